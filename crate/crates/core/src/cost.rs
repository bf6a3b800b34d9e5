//! Output-specific cost functions and their gradients, exemplar and
//! training-set costs, and the flatten/unflatten bijection between weight
//! matrices and the flat weight vector.
//!
//! Flat layout contract: layer blocks in order l = 1..k, each block the
//! column-major vectorization of its weight matrix. The same layout is used
//! for gradients and for on-disk weight files, so analytic and
//! difference-quotient gradients are comparable index by index.

use crate::counters;
use crate::error::{Error, Result};
use crate::network::{check_weights, forward, NetworkSpec, WeightMatrix};
use crate::tensor::{unvectorize, Vector};

/// Output-specific cost function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// `1/2 * sum_j (a_j - y_j)^2`.
    Quadratic,
    /// `-sum_j y_j ln a_j + (1 - y_j) ln(1 - a_j)`. Only defined for output
    /// activations strictly inside (0, 1); out-of-domain activations are an
    /// error rather than being clamped, so gradient checks cannot silently
    /// compare garbage.
    CrossEntropy,
}

fn check_cross_entropy_domain(a: &Vector) -> Result<()> {
    for i in 0..a.dim() {
        if !(a[i] > 0.0 && a[i] < 1.0) {
            return Err(Error::CostDomain { index: i, value: a[i] });
        }
    }
    Ok(())
}

/// Cost of producing activation `a` when the target is `y`.
pub fn cost_value(kind: CostKind, y: &Vector, a: &Vector) -> Result<f64> {
    if y.dim() != a.dim() {
        return Err(Error::DimMismatch(format!(
            "target has dim {}, activation has dim {}",
            y.dim(),
            a.dim()
        )));
    }
    counters::record_cost_evaluation();
    match kind {
        CostKind::Quadratic => {
            Ok(0.5 * (0..y.dim()).map(|j| (a[j] - y[j]) * (a[j] - y[j])).sum::<f64>())
        }
        CostKind::CrossEntropy => {
            check_cross_entropy_domain(a)?;
            Ok(-(0..y.dim())
                .map(|j| y[j] * a[j].ln() + (1.0 - y[j]) * (1.0 - a[j]).ln())
                .sum::<f64>())
        }
    }
}

/// Gradient of the cost with respect to the output activation; this is the
/// vector that seeds the backward recursion.
pub fn cost_gradient(kind: CostKind, y: &Vector, a: &Vector) -> Result<Vector> {
    if y.dim() != a.dim() {
        return Err(Error::DimMismatch(format!(
            "target has dim {}, activation has dim {}",
            y.dim(),
            a.dim()
        )));
    }
    match kind {
        CostKind::Quadratic => Ok(Vector::from_fn(y.dim(), |j| a[j] - y[j])),
        CostKind::CrossEntropy => {
            check_cross_entropy_domain(a)?;
            Ok(Vector::from_fn(y.dim(), |j| -y[j] / a[j] + (1.0 - y[j]) / (1.0 - a[j])))
        }
    }
}

/// Cost of one training exemplar: forward pass composed with `cost_value`.
pub fn exemplar_cost(
    spec: &NetworkSpec,
    weights: &[WeightMatrix],
    kind: CostKind,
    x: &Vector,
    y: &Vector,
) -> Result<f64> {
    let trace = forward(spec, weights, x)?;
    cost_value(kind, y, trace.output())
}

/// An ordered list of (feature, target) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    exemplars: Vec<(Vector, Vector)>,
}

impl TrainingSet {
    /// Builds a set from pairs; all pairs must share one (input, target)
    /// dimension pair and the set must be nonempty.
    pub fn new(exemplars: Vec<(Vector, Vector)>) -> Result<Self> {
        let Some((x0, y0)) = exemplars.first() else {
            return Err(Error::EmptyTrainingSet);
        };
        let (nx, ny) = (x0.dim(), y0.dim());
        for (i, (x, y)) in exemplars.iter().enumerate() {
            if x.dim() != nx || y.dim() != ny {
                return Err(Error::DimMismatch(format!(
                    "exemplar {i} has dims ({}, {}), expected ({nx}, {ny})",
                    x.dim(),
                    y.dim()
                )));
            }
        }
        Ok(Self { exemplars })
    }

    pub fn len(&self) -> usize {
        self.exemplars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exemplars.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (Vector, Vector)> {
        self.exemplars.iter()
    }

    pub fn exemplar(&self, i: usize) -> &(Vector, Vector) {
        &self.exemplars[i]
    }

    pub fn input_dim(&self) -> usize {
        self.exemplars[0].0.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.exemplars[0].1.dim()
    }

    pub fn conforms_to(&self, spec: &NetworkSpec) -> Result<()> {
        if self.input_dim() != spec.input_dim() || self.target_dim() != spec.output_dim() {
            return Err(Error::DimMismatch(format!(
                "training set has dims ({}, {}), spec requires ({}, {})",
                self.input_dim(),
                self.target_dim(),
                spec.input_dim(),
                spec.output_dim()
            )));
        }
        Ok(())
    }
}

/// The flat weight vector: layer-ordered, column-major blocks, dim
/// `p = sum n_l (n_{l-1} + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    spec: NetworkSpec,
    data: Vector,
}

impl WeightVector {
    pub fn new(spec: NetworkSpec, data: Vector) -> Result<Self> {
        if data.dim() != spec.param_count() {
            return Err(Error::DimMismatch(format!(
                "weight vector has dim {}, spec requires p = {}",
                data.dim(),
                spec.param_count()
            )));
        }
        Ok(Self { spec, data })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice()
    }

    /// Rebuilds the per-layer weight matrices. Infallible: the dimension
    /// invariant holds by construction.
    pub fn unflatten(&self) -> Vec<WeightMatrix> {
        (1..=self.spec.layer_count())
            .map(|l| {
                let range = self.spec.layer_param_range(l);
                let block = Vector::from_slice(&self.data.as_slice()[range]);
                WeightMatrix::new(
                    l,
                    unvectorize(&block, self.spec.layer_rows(l), self.spec.layer_cols(l)),
                )
            })
            .collect()
    }
}

/// Stacks per-layer weight matrices into the flat layout.
pub fn flatten(spec: &NetworkSpec, weights: &[WeightMatrix]) -> Result<WeightVector> {
    check_weights(spec, weights)?;
    let mut data = Vec::with_capacity(spec.param_count());
    for w in weights {
        data.extend_from_slice(w.matrix().vectorize().as_slice());
    }
    WeightVector::new(spec.clone(), Vector::from_vec(data))
}

/// Mean exemplar cost over a training set, accumulated in exemplar order.
pub fn additive_cost(
    weight_vector: &WeightVector,
    kind: CostKind,
    set: &TrainingSet,
) -> Result<f64> {
    set.conforms_to(weight_vector.spec())?;
    let weights = weight_vector.unflatten();
    let mut total = 0.0;
    for (x, y) in set.iter() {
        total += exemplar_cost(weight_vector.spec(), &weights, kind, x, y)?;
    }
    Ok(total / set.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ActivationKind;
    use crate::tensor::Matrix;

    fn v(entries: &[f64]) -> Vector {
        Vector::from_slice(entries)
    }

    #[test]
    fn quadratic_cost_at_exact_fit_is_zero() {
        let y = v(&[0.3, 0.7]);
        assert_eq!(cost_value(CostKind::Quadratic, &y, &y).unwrap(), 0.0);
        assert_eq!(cost_gradient(CostKind::Quadratic, &y, &y).unwrap(), v(&[0.0, 0.0]));
    }

    #[test]
    fn quadratic_cost_half_sum_of_squares() {
        let c = cost_value(CostKind::Quadratic, &v(&[1.0, 0.0]), &v(&[0.5, 0.5])).unwrap();
        assert_eq!(c, 0.25);
    }

    #[test]
    fn quadratic_gradient_is_componentwise_difference() {
        let g = cost_gradient(CostKind::Quadratic, &v(&[1.0, 0.0]), &v(&[0.2, 0.9])).unwrap();
        assert!(g.max_abs_diff(&v(&[-0.8, 0.9])) <= 1e-15);
    }

    #[test]
    fn cross_entropy_at_uniform_guess() {
        let c = cost_value(CostKind::CrossEntropy, &v(&[1.0, 0.0]), &v(&[0.5, 0.5])).unwrap();
        assert!((c - 2.0 * std::f64::consts::LN_2).abs() <= 1e-15);
    }

    #[test]
    fn cross_entropy_rejects_out_of_domain_activation_naming_index() {
        let err = cost_value(CostKind::CrossEntropy, &v(&[1.0, 0.0]), &v(&[0.5, 1.0])).unwrap_err();
        assert_eq!(err, Error::CostDomain { index: 1, value: 1.0 });
        let err = cost_gradient(CostKind::CrossEntropy, &v(&[1.0]), &v(&[-0.1])).unwrap_err();
        assert_eq!(err, Error::CostDomain { index: 0, value: -0.1 });
    }

    #[test]
    fn cost_nonnegative_and_zero_iff_fit_for_quadratic() {
        for t in 0..50 {
            let y = v(&[(t as f64 * 0.13).sin(), (t as f64 * 0.29).cos()]);
            let a = v(&[(t as f64 * 0.31).sin(), (t as f64 * 0.17).cos()]);
            let c = cost_value(CostKind::Quadratic, &y, &a).unwrap();
            assert!(c >= 0.0);
            if c == 0.0 {
                assert_eq!(y, a);
            }
        }
    }

    #[test]
    fn cost_gradient_matches_central_difference() {
        // Central difference of cost_value, entirely in test code.
        let eps = 1e-6;
        for kind in [CostKind::Quadratic, CostKind::CrossEntropy] {
            for t in 0..100 {
                let s = t as f64;
                let y = v(&[0.5 + 0.4 * (s * 0.37).sin(), 0.5 + 0.4 * (s * 0.53).cos()]);
                let a = v(&[0.5 + 0.45 * (s * 0.71).sin(), 0.5 + 0.45 * (s * 0.89).cos()]);
                let g = cost_gradient(kind, &y, &a).unwrap();
                for j in 0..a.dim() {
                    let mut ap = a.clone();
                    let mut am = a.clone();
                    ap = Vector::from_fn(a.dim(), |i| if i == j { a[i] + eps } else { ap[i] });
                    am = Vector::from_fn(a.dim(), |i| if i == j { a[i] - eps } else { am[i] });
                    let fd = (cost_value(kind, &y, &ap).unwrap()
                        - cost_value(kind, &y, &am).unwrap())
                        / (2.0 * eps);
                    assert!(
                        (fd - g[j]).abs() <= 1e-6,
                        "{kind:?} gradient mismatch at trial {t}, coord {j}: fd={fd}, g={}",
                        g[j]
                    );
                }
            }
        }
    }

    fn example_spec() -> NetworkSpec {
        NetworkSpec::new(vec![2, 3, 3, 2], ActivationKind::Logistic).unwrap()
    }

    fn example_weights(spec: &NetworkSpec) -> Vec<WeightMatrix> {
        (1..=spec.layer_count())
            .map(|l| {
                WeightMatrix::new(
                    l,
                    Matrix::from_fn(spec.layer_rows(l), spec.layer_cols(l), |i, j| {
                        ((l * 13 + i * 5 + j) as f64 * 0.43).sin()
                    }),
                )
            })
            .collect()
    }

    #[test]
    fn exemplar_cost_is_forward_composed_with_cost() {
        let spec = example_spec();
        let weights = example_weights(&spec);
        let x = v(&[0.2, 0.8]);
        let y = v(&[1.0, 0.0]);
        let via_compose = {
            let trace = forward(&spec, &weights, &x).unwrap();
            cost_value(CostKind::Quadratic, &y, trace.output()).unwrap()
        };
        let direct = exemplar_cost(&spec, &weights, CostKind::Quadratic, &x, &y).unwrap();
        assert_eq!(direct, via_compose);
    }

    #[test]
    fn exemplar_cost_zero_at_constructed_exact_fit() {
        let spec = NetworkSpec::new(vec![2, 2], ActivationKind::Logistic).unwrap();
        let weights = vec![WeightMatrix::new(
            1,
            Matrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]),
        )];
        let x = v(&[0.3, -0.4]);
        let y = spec.activation().componentwise(&x);
        assert_eq!(exemplar_cost(&spec, &weights, CostKind::Quadratic, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn weight_perturbation_matches_first_order_taylor_expansion() {
        // Nudging one weight by eps moves the exemplar cost by about
        // eps times the corresponding backpropagated partial derivative.
        let spec = example_spec();
        let weights = example_weights(&spec);
        let x = v(&[0.2, 0.8]);
        let y = v(&[1.0, 0.0]);
        let eps = 1e-6;

        let base = exemplar_cost(&spec, &weights, CostKind::Quadratic, &x, &y).unwrap();
        let grad = crate::backprop::full_gradient(&spec, &weights, CostKind::Quadratic, &x, &y)
            .unwrap();

        // Entry (1, 2) of the layer-2 matrix sits at column-major offset
        // 2 * rows + 1 inside that layer's block.
        let (l, i, j) = (2usize, 1usize, 2usize);
        let mut perturbed = weights.clone();
        let w = perturbed[l - 1].matrix().clone();
        perturbed[l - 1] = WeightMatrix::new(l, w.with_entry(i, j, w[(i, j)] + eps));
        let shifted = exemplar_cost(&spec, &perturbed, CostKind::Quadratic, &x, &y).unwrap();

        let flat_index = spec.layer_param_range(l).start + j * spec.layer_rows(l) + i;
        let predicted = eps * grad.as_slice()[flat_index];
        assert!(
            ((shifted - base) - predicted).abs() <= 1e-10,
            "actual change {} vs first-order prediction {predicted}",
            shifted - base
        );
    }

    #[test]
    fn flatten_is_layer_ordered_column_major() {
        let spec = NetworkSpec::new(vec![2, 2], ActivationKind::Logistic).unwrap();
        let w = WeightMatrix::new(1, Matrix::from_rows(&[&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0]]));
        let wv = flatten(&spec, &[w]).unwrap();
        assert_eq!(wv.as_vector(), &v(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
    }

    #[test]
    fn param_count_for_example_architecture() {
        assert_eq!(example_spec().param_count(), 29);
    }

    #[test]
    fn flatten_unflatten_round_trip() {
        let spec = example_spec();
        let weights = example_weights(&spec);
        let wv = flatten(&spec, &weights).unwrap();
        assert_eq!(wv.dim(), 29);
        let rebuilt = wv.unflatten();
        assert_eq!(rebuilt, weights);
        let wv2 = flatten(&spec, &rebuilt).unwrap();
        assert_eq!(wv2, wv);
    }

    #[test]
    fn weight_vector_rejects_wrong_dim() {
        assert!(WeightVector::new(example_spec(), Vector::zeros(28)).is_err());
    }

    #[test]
    fn training_set_rejects_empty_and_ragged() {
        assert_eq!(TrainingSet::new(vec![]).unwrap_err(), Error::EmptyTrainingSet);
        let ragged = vec![(v(&[1.0, 2.0]), v(&[1.0])), (v(&[1.0]), v(&[1.0]))];
        assert!(TrainingSet::new(ragged).is_err());
    }

    #[test]
    fn additive_cost_of_single_exemplar_equals_exemplar_cost() {
        let spec = example_spec();
        let weights = example_weights(&spec);
        let wv = flatten(&spec, &weights).unwrap();
        let x = v(&[0.2, 0.8]);
        let y = v(&[1.0, 0.0]);
        let set = TrainingSet::new(vec![(x.clone(), y.clone())]).unwrap();
        let direct = exemplar_cost(&spec, &weights, CostKind::Quadratic, &x, &y).unwrap();
        assert_eq!(additive_cost(&wv, CostKind::Quadratic, &set).unwrap(), direct);
    }

    #[test]
    fn additive_cost_invariant_under_duplication() {
        let spec = example_spec();
        let wv = flatten(&spec, &example_weights(&spec)).unwrap();
        let pairs: Vec<_> = (0..5)
            .map(|i| {
                let s = i as f64;
                (v(&[(s * 0.3).sin(), (s * 0.7).cos()]), v(&[1.0, 0.0]))
            })
            .collect();
        let once = TrainingSet::new(pairs.clone()).unwrap();
        let doubled =
            TrainingSet::new(pairs.iter().flat_map(|p| [p.clone(), p.clone()]).collect()).unwrap();
        let c1 = additive_cost(&wv, CostKind::Quadratic, &once).unwrap();
        let c2 = additive_cost(&wv, CostKind::Quadratic, &doubled).unwrap();
        assert!((c1 - c2).abs() <= 1e-15);
    }

    #[test]
    fn additive_cost_matches_naive_loop_on_200_exemplars() {
        let spec = example_spec();
        let weights = example_weights(&spec);
        let wv = flatten(&spec, &weights).unwrap();
        let pairs: Vec<_> = (0..200)
            .map(|i| {
                let s = i as f64;
                let label = if i % 2 == 0 { v(&[1.0, 0.0]) } else { v(&[0.0, 1.0]) };
                (v(&[(s * 0.11).sin() * 2.0, (s * 0.23).cos() * 2.0]), label)
            })
            .collect();
        let set = TrainingSet::new(pairs.clone()).unwrap();

        let mut naive = 0.0;
        for (x, y) in &pairs {
            naive += exemplar_cost(&spec, &weights, CostKind::Quadratic, x, y).unwrap();
        }
        naive /= pairs.len() as f64;

        let fast = additive_cost(&wv, CostKind::Quadratic, &set).unwrap();
        assert!((fast - naive).abs() <= 1e-12);
    }

    #[test]
    fn additive_cost_of_union_is_weighted_mean() {
        let spec = example_spec();
        let wv = flatten(&spec, &example_weights(&spec)).unwrap();
        let make = |off: usize, n: usize| -> Vec<(Vector, Vector)> {
            (0..n)
                .map(|i| {
                    let s = (off + i) as f64;
                    (v(&[(s * 0.19).sin(), (s * 0.41).cos()]), v(&[0.0, 1.0]))
                })
                .collect()
        };
        let a = make(0, 7);
        let b = make(100, 13);
        let ca = additive_cost(&wv, CostKind::Quadratic, &TrainingSet::new(a.clone()).unwrap()).unwrap();
        let cb = additive_cost(&wv, CostKind::Quadratic, &TrainingSet::new(b.clone()).unwrap()).unwrap();
        let union: Vec<_> = a.iter().chain(b.iter()).cloned().collect();
        let cu = additive_cost(&wv, CostKind::Quadratic, &TrainingSet::new(union).unwrap()).unwrap();
        assert!((cu - (7.0 * ca + 13.0 * cb) / 20.0).abs() <= 1e-12);
    }
}
