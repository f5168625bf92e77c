//! Multiplicative amplitude transduction.
//!
//! Amplitudes `alpha_l` are encoded through their base-`gamma` logarithm
//! `lambda_l = -log_gamma(alpha_l)`, floored and written into a `d`-qubit
//! register `D`. The amplitude is then rebuilt as a product of per-bit
//! factors `gamma^(-2^k)`, one per qubit of `D`:
//!
//! * **direct**: an uncontrolled `RotY(-2 phi_k)` on every qubit of `D` with
//!   `phi_k = atan(gamma^(-2^k))`. The `|0>_D` component of `|lambda>_D`
//!   becomes `Phi * gamma^(-lambda)` with `Phi = prod_k cos(phi_k)`.
//! * **controlled**: a second register `E`; `RotY(2 psi_k)` on `E_k`
//!   controlled by `D_k`, `psi_k = acos(gamma^(-2^k))`. The `|lambda>_D |0>_E`
//!   component is exactly `gamma^(-lambda)`.
//!
//! Rotations about any axis in the X-Y plane would work equally well; only
//! the Y axis is built here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{Circuit, Gate, RegisterLayout, StateVector, XorOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Direct,
    Controlled,
}

impl Variant {
    /// Register whose `|0>` projection carries the target state.
    pub fn target_register(self) -> &'static str {
        match self {
            Variant::Direct => "D",
            Variant::Controlled => "E",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Direct => "direct",
            Variant::Controlled => "controlled",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Variant::Direct),
            "controlled" => Ok(Variant::Controlled),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}`"))),
        }
    }
}

/// Log base, register width and the rotation angles derived from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransductionPlan {
    pub gamma: f64,
    pub d: u32,
    pub variant: Variant,
    /// `phi_k` (direct) or `psi_k` (controlled), `k = 0..d`.
    pub angles: Vec<f64>,
}

impl TransductionPlan {
    pub fn new(gamma: f64, d: u32, variant: Variant) -> Result<Self> {
        check_gamma(gamma)?;
        if d == 0 || d > 62 {
            return Err(Error::InvalidArgument(format!("register width d = {d} out of range")));
        }
        let angles = (0..d)
            .map(|k| {
                let factor = bit_factor(gamma, k);
                match variant {
                    Variant::Direct => factor.atan(),
                    Variant::Controlled => factor.acos(),
                }
            })
            .collect();
        Ok(Self {
            gamma,
            d,
            variant,
            angles,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let plan: Self = serde_json::from_str(s)?;
        // angles are derived data; rebuild so a hand-edited file cannot drift
        Self::new(plan.gamma, plan.d, plan.variant)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("gamma must be finite and > 1, got {gamma}")))
    }
}

/// `gamma^(-2^k)`, evaluated in log space.
fn bit_factor(gamma: f64, k: u32) -> f64 {
    (-(2f64.powi(k as i32)) * gamma.ln()).exp()
}

/// Smallest `d >= 1` with `2^d > -ln(eps) / delta`.
pub fn plan_precision(cutoff_eps: f64, rel_prec_delta: f64) -> Result<u32> {
    if !(cutoff_eps > 0.0 && cutoff_eps < 1.0) {
        return Err(Error::InvalidArgument(format!("cutoff must lie in (0, 1), got {cutoff_eps}")));
    }
    if !(rel_prec_delta > 0.0 && rel_prec_delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "relative precision must be positive, got {rel_prec_delta}"
        )));
    }
    let bound = -cutoff_eps.ln() / rel_prec_delta;
    let mut d = 1u32;
    while 2f64.powi(d as i32) <= bound {
        d += 1;
        if d > 62 {
            return Err(Error::InvalidArgument(format!("precision needs more than 62 qubits ({bound})")));
        }
    }
    Ok(d)
}

/// Largest `gamma` for which every amplitude `>= eps` gets a `lambda` below `2^d`.
pub fn gamma_for_cutoff(cutoff_eps: f64, d: u32) -> Result<f64> {
    if !(cutoff_eps > 0.0 && cutoff_eps < 1.0) {
        return Err(Error::InvalidArgument(format!("cutoff must lie in (0, 1), got {cutoff_eps}")));
    }
    let levels = 2f64.powi(d as i32) - 1.0;
    Ok((-cutoff_eps.ln() / levels).exp())
}

/// `Phi = prod_k cos(atan(gamma^(-2^k)))`.
pub fn phi_product(gamma: f64, d: u32) -> Result<f64> {
    check_gamma(gamma)?;
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    Ok((0..d).map(|k| bit_factor(gamma, k).atan().cos()).product())
}

/// Closed form `sqrt((1 - gamma^-2) / (1 - gamma^(-2^(d+1))))` of [`phi_product`].
pub fn phi_closed_form(gamma: f64, d: u32) -> Result<f64> {
    check_gamma(gamma)?;
    let y = gamma.powi(-2);
    let top = 1.0 - y;
    let bottom = -(-(2f64.powi(d as i32 + 1)) * gamma.ln()).exp_m1();
    Ok((top / bottom).sqrt())
}

/// Target moduli together with their digitized logarithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTable {
    pub alphas: Vec<f64>,
    pub cutoff_eps: f64,
    pub gamma: f64,
    pub d: u32,
    pub lambdas: Vec<u64>,
}

impl AmplitudeTable {
    /// Digitizes `alphas`: `floor(-log_gamma alpha)` at or above the cutoff,
    /// `2^d - 1` strictly below it.
    pub fn build(alphas: &[f64], gamma: f64, d: u32, cutoff_eps: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if d == 0 || d > 62 {
            return Err(Error::InvalidArgument(format!("register width d = {d} out of range")));
        }
        if !(cutoff_eps > 0.0 && cutoff_eps < 1.0) {
            return Err(Error::InvalidArgument(format!("cutoff must lie in (0, 1), got {cutoff_eps}")));
        }
        if alphas.is_empty() || !alphas.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "need 2^n amplitudes, got {}",
                alphas.len()
            )));
        }
        let saturated = (1u64 << d) - 1;
        let ln_gamma = gamma.ln();
        let mut lambdas = Vec::with_capacity(alphas.len());
        for (index, &alpha) in alphas.iter().enumerate() {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::InvalidArgument(format!("alpha[{index}] = {alpha} outside [0, 1]")));
            }
            if alpha < cutoff_eps {
                lambdas.push(saturated);
                continue;
            }
            let lambda = -alpha.ln() / ln_gamma;
            // absorb round-off that would push an exact integer just below itself
            let floored = (lambda + 1e-9).floor().max(0.0);
            if floored >= 2f64.powi(d as i32) {
                return Err(Error::LambdaOverflow {
                    index,
                    lambda: floored as u64,
                    d,
                });
            }
            lambdas.push(floored as u64);
        }
        Ok(Self {
            alphas: alphas.to_vec(),
            cutoff_eps,
            gamma,
            d,
            lambdas,
        })
    }

    /// Table whose logarithms are known exactly, e.g. the Ising model where
    /// `lambda` is half the opposing-pair count.
    pub fn from_exact_lambdas(lambdas: Vec<u64>, gamma: f64, d: u32) -> Result<Self> {
        check_gamma(gamma)?;
        if let Some((index, &lambda)) = lambdas.iter().enumerate().find(|(_, &l)| l >> d != 0) {
            return Err(Error::LambdaOverflow { index, lambda, d });
        }
        let alphas = lambdas.iter().map(|&l| gamma.powf(-(l as f64))).collect();
        Ok(Self {
            alphas,
            cutoff_eps: f64::MIN_POSITIVE,
            gamma,
            d,
            lambdas,
        })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Number of configuration qubits.
    pub fn n(&self) -> usize {
        self.lambdas.len().trailing_zeros() as usize
    }

    pub fn is_saturated(&self, index: usize) -> bool {
        self.alphas[index] < self.cutoff_eps
    }

    /// `gamma^(-lambda_l)` for every entry.
    pub fn transduced(&self) -> Vec<f64> {
        self.lambdas.iter().map(|&l| self.gamma.powf(-(l as f64))).collect()
    }
}

/// Layout `D, [E], [g], C` used by the generic transduction builders.
pub fn transduction_layout(n: usize, d: u32, variant: Variant, exact_zero_flag: bool) -> Result<RegisterLayout> {
    let d = d as usize;
    let mut regs = vec![("D", d)];
    if variant == Variant::Controlled {
        regs.push(("E", d));
    }
    if exact_zero_flag {
        regs.push(("g", 1));
    }
    regs.push(("C", n));
    RegisterLayout::new(&regs)
}

/// The log-amplitude oracle as a basis permutation `|l>_C|y>_D -> |l>_C|y ^ lambda_l>_D`.
pub fn build_lambda_oracle(table: &AmplitudeTable, layout: &RegisterLayout) -> Result<Circuit> {
    let c = layout.register("C")?.clone();
    let d = layout.register("D")?.clone();
    if c.dimension() != table.len() as u64 || d.width != table.d as usize {
        return Err(Error::InvalidLayout(format!(
            "table wants C = {} and D = {} qubits, layout has {} and {}",
            table.n(),
            table.d,
            c.width,
            d.width
        )));
    }
    let mut circuit = Circuit::new(layout.clone());
    circuit.push_oracle(XorOracle::new(c, d, table.lambdas.clone())?)?;
    Ok(circuit)
}

/// Applies the log-amplitude oracle, first checking that `D` is `|0>` on
/// every populated branch.
pub fn apply_lambda_oracle(state: &mut StateVector, table: &AmplitudeTable, layout: &RegisterLayout) -> Result<()> {
    let circuit = build_lambda_oracle(table, layout)?;
    let dmask = layout.register("D")?.mask();
    if let Some((i, _)) = state
        .amplitudes()
        .iter()
        .enumerate()
        .find(|(i, a)| i & dmask != 0 && a.norm_sqr() > 0.0)
    {
        return Err(Error::DirtyRegister(i));
    }
    state.apply_circuit(&circuit)
}

/// Direct transduction: `RotY(-2 phi_k)` on each qubit of `D`.
pub fn build_t1(plan: &TransductionPlan, layout: &RegisterLayout) -> Result<Circuit> {
    if plan.variant != Variant::Direct {
        return Err(Error::WrongVariant("direct"));
    }
    let d = register_of_width(layout, "D", plan.d)?;
    let mut circuit = Circuit::new(layout.clone());
    for (k, phi) in plan.angles.iter().enumerate() {
        circuit.push(Gate::ry(-2.0 * phi, d.qubit(k)))?;
    }
    Ok(circuit)
}

/// Controlled transduction: `RotY(2 psi_k)` on `E_k` controlled by `D_k`.
pub fn build_t2(plan: &TransductionPlan, layout: &RegisterLayout) -> Result<Circuit> {
    if plan.variant != Variant::Controlled {
        return Err(Error::WrongVariant("controlled"));
    }
    let d = register_of_width(layout, "D", plan.d)?;
    let e = register_of_width(layout, "E", plan.d)?;
    let mut circuit = Circuit::new(layout.clone());
    for (k, psi) in plan.angles.iter().enumerate() {
        circuit.push(Gate::ry(2.0 * psi, e.qubit(k)).controlled(d.qubit(k)))?;
    }
    Ok(circuit)
}

/// Transduction block that removes saturated branches from the target
/// projection entirely.
///
/// The flag `g` is set to NAND of all qubits of `D`, so it reads 0 exactly on
/// the saturated value `2^d - 1`. Rotations fire only when `g = 1`. With the
/// controlled variant, every qubit of `E` is flipped when `g = 0`, leaving no
/// `|0>_E` component. With the direct variant, `D` is left at `2^d - 1`, which
/// already has no `|0>_D` component.
pub fn enforce_exact_zero(plan: &TransductionPlan, layout: &RegisterLayout) -> Result<Circuit> {
    let flag = layout
        .register("g")
        .map_err(|_| Error::InvalidLayout("exact-zero handling needs a one-qubit flag register `g`".into()))?
        .clone();
    if flag.width != 1 {
        return Err(Error::InvalidLayout("flag register `g` must have one qubit".into()));
    }
    let g = flag.qubit(0);
    let d = register_of_width(layout, "D", plan.d)?;
    let mut circuit = Circuit::new(layout.clone());

    let mut and = Gate::x(g);
    for q in d.qubits() {
        and = and.controlled(q);
    }
    circuit.push(and)?;
    circuit.push(Gate::x(g))?;

    match plan.variant {
        Variant::Direct => {
            for (k, phi) in plan.angles.iter().enumerate() {
                circuit.push(Gate::ry(-2.0 * phi, d.qubit(k)).controlled(g))?;
            }
        }
        Variant::Controlled => {
            let e = register_of_width(layout, "E", plan.d)?;
            for (k, psi) in plan.angles.iter().enumerate() {
                circuit.push(Gate::ry(2.0 * psi, e.qubit(k)).controlled(d.qubit(k)).controlled(g))?;
            }
            for q in e.qubits() {
                circuit.push(Gate::x(q).anti_controlled(g))?;
            }
        }
    }
    Ok(circuit)
}

fn register_of_width<'a>(
    layout: &'a RegisterLayout,
    name: &str,
    width: u32,
) -> Result<&'a crate::simcore::Register> {
    let reg = layout.register(name)?;
    if reg.width != width as usize {
        return Err(Error::InvalidLayout(format!(
            "register `{name}` has {} qubits, plan needs {width}",
            reg.width
        )));
    }
    Ok(reg)
}

/// Full synthesis circuit `T L H_C` for a tabulated amplitude function.
pub fn build_synthesis(
    table: &AmplitudeTable,
    plan: &TransductionPlan,
    layout: &RegisterLayout,
    exact_zero: bool,
) -> Result<Circuit> {
    if (plan.gamma - table.gamma).abs() > 1e-15 * plan.gamma || plan.d != table.d {
        return Err(Error::InvalidArgument("plan and table disagree on gamma or d".into()));
    }
    let mut circuit = Circuit::new(layout.clone());
    circuit.hadamard_register("C")?;
    circuit.append(&build_lambda_oracle(table, layout)?)?;
    let transduce = if exact_zero {
        enforce_exact_zero(plan, layout)?
    } else {
        match plan.variant {
            Variant::Direct => build_t1(plan, layout)?,
            Variant::Controlled => build_t2(plan, layout)?,
        }
    };
    circuit.append(&transduce)?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn precision_planner_examples() {
        assert_eq!(plan_precision(0.001, 0.001).unwrap(), 13);
        assert_eq!(plan_precision(1.0 / std::f64::consts::E, 1.0).unwrap(), 1);
        assert_eq!(plan_precision(0.01, 0.005).unwrap(), 10);
        assert!(plan_precision(0.0, 0.1).is_err());
        assert!(plan_precision(0.1, 0.0).is_err());
        assert!(plan_precision(1.0, 0.1).is_err());
    }

    #[test]
    fn plan_angles_lie_in_their_ranges() {
        let direct = TransductionPlan::new(1.3, 6, Variant::Direct).unwrap();
        assert!(direct.angles.iter().all(|&a| a > 0.0 && a < std::f64::consts::FRAC_PI_4));
        let controlled = TransductionPlan::new(1.3, 6, Variant::Controlled).unwrap();
        assert!(controlled
            .angles
            .iter()
            .all(|&a| a > 0.0 && a < std::f64::consts::FRAC_PI_2));
        assert!(TransductionPlan::new(1.0, 3, Variant::Direct).is_err());
        assert!(TransductionPlan::new(0.5, 3, Variant::Direct).is_err());
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = TransductionPlan::new(1.5, 4, Variant::Controlled).unwrap();
        let back = TransductionPlan::from_json(&plan.to_json().unwrap()).unwrap();
        assert_eq!(plan, back);
    }

    #[test]
    fn lambda_table_examples() {
        let t = AmplitudeTable::build(&[1.0, 0.3], 2.0, 4, 0.001).unwrap();
        assert_eq!(t.lambdas, vec![0, 1]);
        let t = AmplitudeTable::build(&[0.0, 1.0], 2.0, 4, 0.001).unwrap();
        assert_eq!(t.lambdas[0], 15);
        // alpha == eps is not saturated
        let t = AmplitudeTable::build(&[0.25, 1.0], 2.0, 4, 0.25).unwrap();
        assert_eq!(t.lambdas[0], 2);
    }

    #[test]
    fn lambda_overflow_is_an_error() {
        // -log2(0.01) = 6.6 needs 3 qubits
        let err = AmplitudeTable::build(&[0.01, 1.0], 2.0, 2, 0.001).unwrap_err();
        assert!(matches!(err, Error::LambdaOverflow { index: 0, .. }));
        assert!(AmplitudeTable::build(&[1.5, 1.0], 2.0, 2, 0.001).is_err());
        assert!(AmplitudeTable::build(&[1.0, 1.0, 1.0], 2.0, 2, 0.001).is_err());
    }

    #[test]
    fn phi_examples() {
        let gamma = 0.2f64.exp();
        let phi = phi_product(gamma, 3).unwrap();
        let oracle = (1.0 - (-0.4f64).exp()) / (1.0 - (-3.2f64).exp());
        assert!((phi * phi - oracle).abs() < 1e-12);
        assert!((phi * phi - 0.34372).abs() < 1e-4);
        assert!((phi_product(gamma, 40).unwrap() - (1.0 - gamma.powi(-2)).sqrt()).abs() < 1e-12);
        assert!((phi_product(1e6, 5).unwrap() - 1.0).abs() < 1e-11);
        assert!(phi_product(1.0, 3).is_err());
    }

    #[test]
    fn t1_gate_counts_and_variant_check() {
        let plan = TransductionPlan::new(2.0, 3, Variant::Direct).unwrap();
        let layout = transduction_layout(1, 3, Variant::Direct, false).unwrap();
        let t1 = build_t1(&plan, &layout).unwrap();
        assert_eq!(t1.len(), 3);
        assert_eq!(t1.controlled_gate_count(), 0);
        assert!(matches!(build_t2(&plan, &layout), Err(Error::WrongVariant(_))));
    }

    #[test]
    fn t2_needs_e_register() {
        let plan = TransductionPlan::new(2.0, 3, Variant::Controlled).unwrap();
        let layout = transduction_layout(1, 3, Variant::Direct, false).unwrap();
        assert!(matches!(build_t2(&plan, &layout), Err(Error::UnknownRegister(_))));
        let layout = transduction_layout(1, 3, Variant::Controlled, false).unwrap();
        let t2 = build_t2(&plan, &layout).unwrap();
        assert_eq!(t2.len(), 3);
        assert!(t2.gates().all(|g| g.controls.len() == 1));
    }

    #[test]
    fn exact_zero_needs_flag() {
        let plan = TransductionPlan::new(2.0, 3, Variant::Direct).unwrap();
        let layout = transduction_layout(1, 3, Variant::Direct, false).unwrap();
        assert!(enforce_exact_zero(&plan, &layout).is_err());
    }

    #[test]
    fn lambda_oracle_definitional_example() {
        // n = 1, lambdas (1, 2), d = 2
        let table = AmplitudeTable::from_exact_lambdas(vec![1, 2], 2.0, 2).unwrap();
        let layout = transduction_layout(1, 2, Variant::Direct, false).unwrap();
        let mut s = StateVector::new(layout.total_qubits());
        let mut h = Circuit::new(layout.clone());
        h.hadamard_register("C").unwrap();
        s.apply_circuit(&h).unwrap();
        apply_lambda_oracle(&mut s, &table, &layout).unwrap();
        let c = layout.register("C").unwrap();
        let d = layout.register("D").unwrap();
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        let i0 = c.deposit(d.deposit(0, 1), 0);
        let i1 = c.deposit(d.deposit(0, 2), 1);
        assert!((s.amplitude(i0) - Complex64::new(amp, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(i1) - Complex64::new(amp, 0.0)).norm() < 1e-12);
        // the checked entry point refuses a dirty D register
        assert!(matches!(
            apply_lambda_oracle(&mut s, &table, &layout),
            Err(Error::DirtyRegister(_))
        ));
    }
}
