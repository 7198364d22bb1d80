//! Network-to-polynomial conversion.
//!
//! The engine alternates two steps across layers. The linear step is exact:
//! the next layer's pre-activation polynomials are weighted sums of the
//! previous layer's post-activation polynomials. The activation step is the
//! approximation: a truncated Maclaurin expansion of the activation applied
//! to a polynomial argument, with the output coefficient of each monomial
//! assembled from the partitions of that monomial's multiset. Monomial orders
//! would otherwise grow multiplicatively layer by layer, so a running cap
//! truncates everything above `max_order`.
//!
//! For a target monomial t with multiset M, each partition of M into blocks
//! picks one factor per block from the input polynomial; a partition with m
//! blocks containing r₁, r₂, … repeats of each distinct block contributes
//!
//! ```text
//!   (Σ_{n=m}^{q} cₙ · n!/(n-m)! · β₀^{n-m}) / (r₁!·r₂!·…) · Π_blocks β_block^r
//! ```
//!
//! where cₙ are the activation's Maclaurin coefficients and β₀ the input
//! intercept: the n!/(n-m)!/(Πr!) multinomial counts the orderings inside the
//! n-th power, and intercept factors fill the n − m unused slots. The
//! intercept output is the plain series value Σ cₙ β₀ⁿ.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::activation::{taylor_coefficients, ActivationKind, MAX_TAYLOR_ORDER};
use crate::combinatorics::{PartitionCache, DEFAULT_PARTITION_CEILING};
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::poly::{Monomial, Polynomial};

/// Taylor truncation orders for the nonlinear layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaylorOrders {
    /// One order for every nonlinear layer.
    Uniform(usize),
    /// One order per nonlinear layer, in network order.
    PerLayer(Vec<usize>),
}

/// Conversion settings.
#[derive(Clone, Debug)]
pub struct TransformConfig {
    /// Cap on the final polynomial's monomial order.
    pub max_order: usize,
    pub taylor_orders: TaylorOrders,
    /// Also return the input/output polynomial pair of every layer.
    pub keep_layers: bool,
    /// Abort if the partition cache would exceed this many partitions.
    pub partition_ceiling: usize,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            max_order: 3,
            taylor_orders: TaylorOrders::Uniform(8),
            keep_layers: false,
            partition_ceiling: DEFAULT_PARTITION_CEILING,
        }
    }
}

impl TransformConfig {
    fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(Error::InvalidConfig("max_order must be at least 1".into()));
        }
        if self.partition_ceiling == 0 {
            return Err(Error::InvalidConfig(
                "partition_ceiling must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The pre-activation (`input`) and post-activation (`output`) polynomials of
/// one layer, one channel per neuron. For linear layers the two coincide.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerPolynomials {
    pub layer: usize,
    pub input: Polynomial,
    pub output: Polynomial,
}

/// Result of [`transform`].
#[derive(Clone, Debug, PartialEq)]
pub enum TransformOutput {
    Final(Polynomial),
    Layered(Vec<LayerPolynomials>),
}

impl TransformOutput {
    /// The polynomial representing the network output.
    pub fn final_polynomial(&self) -> &Polynomial {
        match self {
            TransformOutput::Final(poly) => poly,
            TransformOutput::Layered(layers) => {
                &layers.last().expect("a network has at least one layer").output
            }
        }
    }

    pub fn into_final_polynomial(self) -> Polynomial {
        match self {
            TransformOutput::Final(poly) => poly,
            TransformOutput::Layered(mut layers) => {
                layers.pop().expect("a network has at least one layer").output
            }
        }
    }

    pub fn layers(&self) -> Option<&[LayerPolynomials]> {
        match self {
            TransformOutput::Final(_) => None,
            TransformOutput::Layered(layers) => Some(layers),
        }
    }
}

/// Taylor order for each layer: `None` for linear layers.
fn assign_taylor_orders(
    config: &TransformConfig,
    net: &NetworkSpec,
) -> Result<Vec<Option<usize>>> {
    let check = |q: usize| -> Result<usize> {
        if q == 0 {
            Err(Error::InvalidTaylorOrder {
                q,
                reason: "nonlinear layers need a Taylor order of at least 1",
            })
        } else if q > MAX_TAYLOR_ORDER {
            Err(Error::InvalidTaylorOrder {
                q,
                reason: "orders above 30 lose precision to factorial scaling",
            })
        } else {
            Ok(q)
        }
    };
    let nonlinear: Vec<usize> = net
        .layers()
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.activation.is_linear())
        .map(|(i, _)| i)
        .collect();
    let mut orders = vec![None; net.depth()];
    match &config.taylor_orders {
        TaylorOrders::Uniform(q) => {
            let q = check(*q)?;
            for &i in &nonlinear {
                orders[i] = Some(q);
            }
        }
        TaylorOrders::PerLayer(list) => {
            if list.len() != nonlinear.len() {
                return Err(Error::InvalidConfig(format!(
                    "taylor_orders lists {} entries but the network has {} nonlinear layers",
                    list.len(),
                    nonlinear.len()
                )));
            }
            for (&i, &q) in nonlinear.iter().zip(list) {
                orders[i] = Some(check(q)?);
            }
        }
    }
    Ok(orders)
}

/// Effective order cap after each layer: starting from order 1, a nonlinear
/// layer with Taylor order q multiplies the running order by q (clamped at
/// `max_order`); linear layers leave it unchanged.
pub fn derive_order_schedule(config: &TransformConfig, net: &NetworkSpec) -> Result<Vec<usize>> {
    config.validate()?;
    let orders = assign_taylor_orders(config, net)?;
    let mut running = 1usize;
    Ok(orders
        .iter()
        .map(|q| {
            if let Some(q) = q {
                running = config.max_order.min(running.saturating_mul(*q));
            }
            running
        })
        .collect())
}

/// One precompiled partition of a target monomial: which input rows to
/// multiply and the combinatorial factors that weight them.
struct PlanItem {
    /// (input row, multiplicity) per distinct block.
    blocks: Vec<(usize, u32)>,
    /// Total number of blocks, counting repeats.
    block_count: usize,
    /// Product of the repeat factorials.
    denom: f64,
}

/// Per-output-row partition plans (empty for the intercept row and for
/// targets none of whose partitions survive the input label space).
fn build_plans(
    out_labels: &[Monomial],
    in_index: &HashMap<Monomial, usize>,
    in_max_order: usize,
    cache: &PartitionCache,
) -> Result<Vec<Vec<PlanItem>>> {
    let factorial = |k: u32| -> f64 { (1..=k).map(|v| v as f64).product() };
    out_labels
        .iter()
        .map(|label| {
            if label.is_intercept() {
                return Ok(Vec::new());
            }
            let partitions = cache.partitions_for_label(label)?;
            let mut items = Vec::new();
            'partitions: for partition in &partitions {
                let mut blocks: Vec<(usize, u32)> = Vec::new();
                for block in partition.blocks() {
                    // Condition 2: factors must exist in the input polynomial
                    if block.size() > in_max_order {
                        continue 'partitions;
                    }
                    let monomial = Monomial::new(block.expanded());
                    let Some(&row) = in_index.get(&monomial) else {
                        continue 'partitions; // absent label = zero coefficient
                    };
                    match blocks.iter_mut().find(|(r, _)| *r == row) {
                        Some((_, count)) => *count += 1,
                        None => blocks.push((row, 1)),
                    }
                }
                let denom = blocks.iter().map(|&(_, count)| factorial(count)).product();
                items.push(PlanItem {
                    blocks,
                    block_count: partition.len(),
                    denom,
                });
            }
            Ok(items)
        })
        .collect()
}

/// Run the Maclaurin substitution for every channel. `out` must be zeroed,
/// with rows aligned to `out_labels`; rows above `compute_cap` stay zero.
fn apply_activation(
    in_values: ArrayView2<'_, f64>,
    in_intercept_row: Option<usize>,
    plans: &[Vec<PlanItem>],
    out_labels: &[Monomial],
    compute_cap: usize,
    coeffs: &[f64],
    out: &mut Array2<f64>,
) {
    let q = coeffs.len() - 1;
    let mut factorials = vec![1.0; q + 1];
    for n in 1..=q {
        factorials[n] = factorials[n - 1] * n as f64;
    }
    for channel in 0..in_values.ncols() {
        let beta0 = in_intercept_row.map_or(0.0, |row| in_values[(row, channel)]);
        // weight[m] = Σ_{n=m}^{q} cₙ · n!/(n-m)! · β₀^{n-m}
        let mut weight = vec![0.0; q + 1];
        for (m, w) in weight.iter_mut().enumerate() {
            let mut acc = 0.0;
            let mut power = 1.0;
            for n in m..=q {
                acc += coeffs[n] * (factorials[n] / factorials[n - m]) * power;
                power *= beta0;
            }
            *w = acc;
        }
        for (row, label) in out_labels.iter().enumerate() {
            if label.is_intercept() {
                out[(row, channel)] = weight[0];
                continue;
            }
            if label.order() > compute_cap {
                continue;
            }
            let mut total = 0.0;
            for item in &plans[row] {
                if item.block_count > q {
                    continue; // Condition 1 has no solutions
                }
                let mut product = 1.0;
                for &(block_row, mult) in &item.blocks {
                    let value = in_values[(block_row, channel)];
                    if value == 0.0 {
                        product = 0.0;
                        break;
                    }
                    product *= value.powi(mult as i32);
                }
                if product != 0.0 {
                    total += product * weight[item.block_count] / item.denom;
                }
            }
            out[(row, channel)] = total;
        }
    }
}

/// Expand `g(in_poly)` as a polynomial with all labels up to `order_cap`,
/// using a Taylor expansion of order `q` around zero. Linear activations
/// return the input unchanged. Works channel by channel.
pub fn activation_step(
    in_poly: &Polynomial,
    act: ActivationKind,
    q: usize,
    order_cap: usize,
    cache: &PartitionCache,
) -> Result<Polynomial> {
    if act.is_linear() {
        return Ok(in_poly.clone());
    }
    if q == 0 {
        return Err(Error::InvalidTaylorOrder {
            q,
            reason: "nonlinear activation needs q >= 1",
        });
    }
    if q > MAX_TAYLOR_ORDER {
        return Err(Error::InvalidTaylorOrder {
            q,
            reason: "orders above 30 lose precision to factorial scaling",
        });
    }
    if cache.max_order() < order_cap {
        return Err(Error::InvalidConfig(format!(
            "partition cache covers order {} but the step needs {}",
            cache.max_order(),
            order_cap
        )));
    }
    let labels = Polynomial::full_label_set(in_poly.p(), order_cap);
    let index = in_poly.label_index();
    let plans = build_plans(&labels, &index, in_poly.max_order(), cache)?;
    let coeffs = taylor_coefficients(act, q).coeffs;
    let intercept_row = index.get(&Monomial::intercept()).copied();
    let mut out = Array2::zeros((labels.len(), in_poly.channels()));
    apply_activation(
        in_poly.values(),
        intercept_row,
        &plans,
        &labels,
        order_cap,
        &coeffs,
        &mut out,
    );
    Polynomial::new(in_poly.p(), order_cap, labels, out)
}

/// Convert a network into a polynomial over its input variables.
///
/// Layer 1's pre-activation polynomials are the affine maps of the first
/// weight matrix; each subsequent layer applies [`activation_step`] per neuron
/// followed by the next weight matrix's linear combination. The result has one
/// channel per network output. With `keep_layers`, every layer's polynomial
/// pair is returned and the final polynomial is the last entry's output.
///
/// All returned polynomials share one label list (every monomial up to
/// `max_order`), so coefficients at matching rows are comparable across
/// layers; entries above a layer's effective order cap are zero.
pub fn transform(net: &NetworkSpec, config: &TransformConfig) -> Result<TransformOutput> {
    config.validate()?;
    let taylor = assign_taylor_orders(config, net)?;
    let schedule = derive_order_schedule(config, net)?;

    let p = net.input_dim();
    let labels = Polynomial::full_label_set(p, config.max_order);
    let index: HashMap<Monomial, usize> = labels
        .iter()
        .enumerate()
        .map(|(row, label)| (label.clone(), row))
        .collect();
    let cache = PartitionCache::build_with_ceiling(p, config.max_order, config.partition_ceiling)?;
    let plans = build_plans(&labels, &index, config.max_order, &cache)?;

    // pre-activation polynomials of layer 1: bias + Σ wᵢⱼ xᵢ
    let first = &net.layers()[0];
    let mut current: Array2<f64> = Array2::zeros((labels.len(), first.units()));
    current.row_mut(0).assign(&first.bias());
    for var in 0..p {
        current.row_mut(1 + var).assign(&first.kernel().row(var));
    }

    let mut kept = Vec::new();
    for (l, layer) in net.layers().iter().enumerate() {
        let out_values = if layer.activation.is_linear() {
            current.clone()
        } else {
            let q = taylor[l].expect("nonlinear layers have a Taylor order");
            let coeffs = taylor_coefficients(layer.activation, q).coeffs;
            let mut out = Array2::zeros(current.dim());
            apply_activation(
                current.view(),
                Some(0),
                &plans,
                &labels,
                schedule[l],
                &coeffs,
                &mut out,
            );
            out
        };
        if config.keep_layers {
            kept.push(LayerPolynomials {
                layer: l + 1,
                input: Polynomial::new(p, config.max_order, labels.clone(), current.clone())?,
                output: Polynomial::new(p, config.max_order, labels.clone(), out_values.clone())?,
            });
        }
        current = match net.layers().get(l + 1) {
            Some(next) => {
                let mut combined = out_values.dot(&next.kernel());
                let mut intercept = combined.row_mut(0);
                intercept += &next.bias();
                combined
            }
            None => out_values,
        };
    }

    if config.keep_layers {
        Ok(TransformOutput::Layered(kept))
    } else {
        Ok(TransformOutput::Final(Polynomial::new(
            p,
            config.max_order,
            labels,
            current,
        )?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::ActivationKind;
    use crate::network::Layer;
    use ndarray::array;

    fn tanh_cache(p: usize, order: usize) -> PartitionCache {
        PartitionCache::build(p, order).unwrap()
    }

    fn affine_poly(p: usize, bias: f64, slopes: &[f64]) -> Polynomial {
        let mut labels = vec![Monomial::intercept()];
        labels.extend((1..=p as u32).map(|v| Monomial::new(vec![v])));
        let mut values = vec![bias];
        values.extend_from_slice(slopes);
        Polynomial::single_output(p, 1, labels, values).unwrap()
    }

    #[test]
    fn tanh_of_scaled_variable() {
        // tanh(0.5 x) = 0.5 x - (0.5 x)³/3 + O(x⁵)
        let in_poly = affine_poly(1, 0.0, &[0.5]);
        let cache = tanh_cache(1, 3);
        let out = activation_step(&in_poly, ActivationKind::Tanh, 3, 3, &cache).unwrap();
        assert_eq!(out.len(), 4); // 1, x, x², x³
        assert!((out.coefficient(&[1], 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((out.coefficient(&[1, 1, 1], 0).unwrap() + 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(out.coefficient(&[0], 0).unwrap(), 0.0);
        assert_eq!(out.coefficient(&[1, 1], 0).unwrap(), 0.0);
    }

    #[test]
    fn sigmoid_of_constant() {
        // σ(1) truncated at q = 2: 1/2 + 1/4·1 + 0·1²
        let in_poly =
            Polynomial::single_output(2, 0, vec![Monomial::intercept()], vec![1.0]).unwrap();
        let cache = tanh_cache(2, 1);
        let out = activation_step(&in_poly, ActivationKind::Sigmoid, 2, 1, &cache).unwrap();
        assert!((out.coefficient(&[0], 0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn linear_step_is_identity() {
        let in_poly = affine_poly(3, 0.25, &[1.0, -2.0, 0.5]);
        let cache = tanh_cache(3, 2);
        let out = activation_step(&in_poly, ActivationKind::Linear, 1, 2, &cache).unwrap();
        assert_eq!(out, in_poly);
    }

    #[test]
    fn nonlinear_step_needs_positive_q() {
        let in_poly = affine_poly(1, 0.0, &[1.0]);
        let cache = tanh_cache(1, 1);
        assert!(matches!(
            activation_step(&in_poly, ActivationKind::Tanh, 0, 1, &cache),
            Err(Error::InvalidTaylorOrder { q: 0, .. })
        ));
    }

    fn single_path_net(activations: &[(ActivationKind, Array2<f64>)]) -> NetworkSpec {
        NetworkSpec::new(
            activations
                .iter()
                .map(|(act, w)| Layer::new(*act, w.clone()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn schedule_saturates_at_max_order() {
        let net = single_path_net(&[
            (ActivationKind::Tanh, array![[0.0], [0.1]]),
            (ActivationKind::Tanh, array![[0.0], [0.1]]),
            (ActivationKind::Tanh, array![[0.0], [0.1]]),
        ]);
        let config = TransformConfig {
            max_order: 3,
            taylor_orders: TaylorOrders::Uniform(8),
            ..TransformConfig::default()
        };
        assert_eq!(derive_order_schedule(&config, &net).unwrap(), vec![3, 3, 3]);
    }

    #[test]
    fn schedule_grows_multiplicatively() {
        let net = single_path_net(&[
            (ActivationKind::Tanh, array![[0.0], [0.1]]),
            (ActivationKind::Tanh, array![[0.0], [0.1]]),
        ]);
        let config = TransformConfig {
            max_order: 8,
            taylor_orders: TaylorOrders::PerLayer(vec![2, 2]),
            ..TransformConfig::default()
        };
        assert_eq!(derive_order_schedule(&config, &net).unwrap(), vec![2, 4]);
    }

    #[test]
    fn schedule_is_flat_for_linear_networks() {
        let net = single_path_net(&[
            (ActivationKind::Linear, array![[0.0], [0.1]]),
            (ActivationKind::Linear, array![[0.0], [0.1]]),
        ]);
        let config = TransformConfig::default();
        assert_eq!(derive_order_schedule(&config, &net).unwrap(), vec![1, 1]);
    }

    #[test]
    fn taylor_order_list_must_match_nonlinear_count() {
        let net = single_path_net(&[
            (ActivationKind::Tanh, array![[0.0], [0.1]]),
            (ActivationKind::Linear, array![[0.0], [0.1]]),
        ]);
        let config = TransformConfig {
            taylor_orders: TaylorOrders::PerLayer(vec![3, 3]),
            ..TransformConfig::default()
        };
        assert!(transform(&net, &config).is_err());
    }

    #[test]
    fn all_linear_network_composes_affine_maps() {
        // W: 2 -> 3 -> 1 with arbitrary weights
        let w1 = array![[0.5, -0.25, 1.0], [2.0, 0.5, -1.5], [0.75, 1.25, 0.0]];
        let w2 = array![[0.1], [1.0], [-2.0], [0.5]];
        let net = single_path_net(&[
            (ActivationKind::Linear, w1.clone()),
            (ActivationKind::Linear, w2.clone()),
        ]);
        let config = TransformConfig {
            max_order: 3,
            ..TransformConfig::default()
        };
        let poly = transform(&net, &config)
            .unwrap()
            .into_final_polynomial();

        // explicit composition: bias = b2 + b1·K2, kernel = K1·K2
        let k = w1.slice(ndarray::s![1.., ..]).dot(&w2.slice(ndarray::s![1.., ..]));
        let b = w2[(0, 0)]
            + w1.row(0).dot(&w2.slice(ndarray::s![1.., ..]).column(0));
        assert!((poly.coefficient(&[0], 0).unwrap() - b).abs() < 1e-12);
        for var in 0..2 {
            let got = poly.coefficient(&[var as u32 + 1], 0).unwrap();
            assert!((got - k[(var, 0)]).abs() < 1e-12 * k[(var, 0)].abs().max(1.0));
        }
        // everything above order 1 is zero
        for (row, label) in poly.labels().iter().enumerate() {
            if label.order() > 1 {
                assert_eq!(poly.values()[(row, 0)], 0.0);
            }
        }

        // and evaluation matches the forward pass
        let x = array![[0.3, -0.8], [1.0, 1.0], [-0.5, 0.25]];
        let via_poly = poly.eval(x.view()).unwrap();
        let via_net = net.forward(x.view()).unwrap();
        for (a, b) in via_poly.iter().zip(via_net.iter()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn single_tanh_neuron_through_identity_output() {
        let net = single_path_net(&[
            (ActivationKind::Tanh, array![[0.0], [0.5]]),
            (ActivationKind::Linear, array![[0.0], [1.0]]),
        ]);
        let config = TransformConfig {
            max_order: 3,
            taylor_orders: TaylorOrders::Uniform(3),
            ..TransformConfig::default()
        };
        let poly = transform(&net, &config).unwrap().into_final_polynomial();
        assert!((poly.coefficient(&[1], 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((poly.coefficient(&[1, 1, 1], 0).unwrap() + 1.0 / 24.0).abs() < 1e-15);
    }

    /// Naive oracle: explicit coefficient-map polynomials, Maclaurin series
    /// substitution by repeated truncated multiplication.
    mod naive {
        use std::collections::HashMap;

        pub type Poly = HashMap<Vec<u32>, f64>;

        pub fn mul(a: &Poly, b: &Poly, cap: usize) -> Poly {
            let mut out = Poly::new();
            for (la, ca) in a {
                for (lb, cb) in b {
                    let mut label: Vec<u32> = la.iter().chain(lb.iter()).copied().collect();
                    label.sort_unstable();
                    if label.len() > cap {
                        continue;
                    }
                    *out.entry(label).or_insert(0.0) += ca * cb;
                }
            }
            out
        }

        pub fn series(input: &Poly, coeffs: &[f64], cap: usize) -> Poly {
            let mut out = Poly::new();
            out.insert(vec![], coeffs[0]);
            let mut power: Poly = HashMap::from([(vec![], 1.0)]);
            for &c in &coeffs[1..] {
                power = mul(&power, input, cap);
                for (label, value) in &power {
                    *out.entry(label.clone()).or_insert(0.0) += c * value;
                }
            }
            out
        }
    }

    #[test]
    fn activation_step_matches_naive_substitution() {
        let in_poly = affine_poly(2, 0.3, &[0.4, -0.2]);
        let cache = tanh_cache(2, 3);
        let q = 3;
        let out = activation_step(&in_poly, ActivationKind::Sigmoid, q, 3, &cache).unwrap();

        let coeffs = taylor_coefficients(ActivationKind::Sigmoid, q).coeffs;
        let naive_in: naive::Poly = [
            (vec![], 0.3),
            (vec![1], 0.4),
            (vec![2], -0.2),
        ]
        .into_iter()
        .collect();
        let expected = naive::series(&naive_in, &coeffs, 3);
        for (row, label) in out.labels().iter().enumerate() {
            let want = expected.get(label.indices()).copied().unwrap_or(0.0);
            let got = out.values()[(row, 0)];
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "{label}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn toy_network_keep_layers_structure() {
        // 5 -> 2 (tanh) -> 3 (sigmoid) -> 1 (linear), zero bias, unit kernels
        let ones = |rows: usize, cols: usize| {
            let mut w = Array2::from_elem((rows, cols), 1.0);
            w.row_mut(0).fill(0.0);
            w
        };
        let net = single_path_net(&[
            (ActivationKind::Tanh, ones(6, 2)),
            (ActivationKind::Sigmoid, ones(3, 3)),
            (ActivationKind::Linear, ones(4, 1)),
        ]);
        let config = TransformConfig {
            max_order: 3,
            keep_layers: true,
            ..TransformConfig::default()
        };
        let output = transform(&net, &config).unwrap();
        let layers = output.layers().unwrap();
        assert_eq!(layers.len(), 3);

        let widths = [2, 3, 1];
        for (entry, &width) in layers.iter().zip(&widths) {
            assert_eq!(entry.input.channels(), width);
            assert_eq!(entry.output.channels(), width);
            // one shared label list across every layer and side
            assert_eq!(entry.input.labels(), layers[0].input.labels());
            assert_eq!(entry.output.labels(), layers[0].input.labels());
            assert_eq!(entry.input.len(), 56);
        }
        assert_eq!(layers[1].layer, 2);
        assert_eq!(layers[1].input.len(), 56);
        assert_eq!(layers[1].input.channels(), 3);

        // linear output layer: input and output coincide, and the final
        // polynomial is that last output
        assert_eq!(layers[2].input, layers[2].output);
        assert_eq!(output.final_polynomial(), &layers[2].output);
    }

    #[test]
    fn taylor_locality_on_small_weights() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut small = |rows: usize, cols: usize| {
            Array2::from_shape_fn((rows, cols), |_| rng.random_range(-0.1..0.1))
        };
        let net = single_path_net(&[
            (ActivationKind::Tanh, small(4, 6)),
            (ActivationKind::Tanh, small(7, 4)),
            (ActivationKind::Linear, small(5, 1)),
        ]);
        let config = TransformConfig {
            max_order: 3,
            taylor_orders: TaylorOrders::Uniform(8),
            ..TransformConfig::default()
        };
        let poly = transform(&net, &config).unwrap().into_final_polynomial();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let x = Array2::from_shape_fn((64, 3), |_| rng.random_range(-0.1..0.1));
        let via_poly = poly.eval(x.view()).unwrap();
        let via_net = net.forward(x.view()).unwrap();
        let max_dev = via_poly
            .iter()
            .zip(via_net.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_dev <= 1e-3, "max deviation {max_dev}");
    }

    #[test]
    fn ceiling_surfaces_as_transform_error() {
        let net = single_path_net(&[
            (ActivationKind::Tanh, array![[0.0], [0.1]]),
            (ActivationKind::Linear, array![[0.0], [1.0]]),
        ]);
        let config = TransformConfig {
            max_order: 3,
            partition_ceiling: 1,
            ..TransformConfig::default()
        };
        assert!(matches!(
            transform(&net, &config),
            Err(Error::PartitionCeilingExceeded { .. })
        ));
    }
}
