//! Entropic quantities (base-2) and numerical checks of the information
//! inequalities the security arguments lean on: Pinsker and the
//! complementary-information tradeoff for a measured qubit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::linalg::{self, CMatrix};
use crate::qcore::{self, DensityOperator, PureState, Register, RegisterLayout};

/// Eigenvalues below this are treated as exact zeros before taking logs.
const EIG_CLIP: f64 = 1e-12;
/// Support-containment threshold for the relative entropy.
const SUPPORT_TOL: f64 = 1e-9;

/// Named scalar result, for reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyReport {
    pub quantity: String,
    pub value: f64,
    pub operands: String,
}

impl EntropyReport {
    pub fn new(quantity: &str, value: f64, operands: &str) -> Self {
        EntropyReport {
            quantity: quantity.into(),
            value,
            operands: operands.into(),
        }
    }
}

/// Von Neumann entropy −Σ λ log₂ λ over eigenvalues above the clip.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    let (vals, _) = linalg::eigh(&rho.matrix);
    -vals
        .iter()
        .filter(|&&v| v > EIG_CLIP)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

fn check_disjoint(a: &[String], b: &[String]) -> QResult<()> {
    for id in a {
        if b.contains(id) {
            return Err(QError::InvalidArgument(format!(
                "register sets overlap at `{id}`"
            )));
        }
    }
    Ok(())
}

/// Conditional entropy S(A|B) = S(AB) − S(B).
pub fn conditional_entropy(rho: &DensityOperator, a: &[String], b: &[String]) -> QResult<f64> {
    check_disjoint(a, b)?;
    let mut ab: Vec<String> = a.to_vec();
    ab.extend_from_slice(b);
    let rho_ab = qcore::partial_trace(rho, &ab)?;
    let rho_b = qcore::partial_trace(rho, b)?;
    Ok(von_neumann_entropy(&rho_ab) - von_neumann_entropy(&rho_b))
}

/// Mutual information I(A:B) = S(A) + S(B) − S(AB).
///
/// Debug builds verify the relative-entropy identity
/// I(A:B) = D(ρ_AB ‖ ρ_A ⊗ ρ_B) to 1e-7 when the register sets are stored
/// contiguously in (A, B) order.
pub fn mutual_information(rho: &DensityOperator, a: &[String], b: &[String]) -> QResult<f64> {
    check_disjoint(a, b)?;
    let mut ab: Vec<String> = a.to_vec();
    ab.extend_from_slice(b);
    let rho_ab = qcore::partial_trace(rho, &ab)?;
    let rho_a = qcore::partial_trace(rho, a)?;
    let rho_b = qcore::partial_trace(rho, b)?;
    let i = von_neumann_entropy(&rho_a) + von_neumann_entropy(&rho_b)
        - von_neumann_entropy(&rho_ab);
    if cfg!(debug_assertions) && rho_ab.layout.ids() == ab {
        if let Ok(prod) = rho_a.tensor(&rho_b) {
            let d = relative_entropy(&rho_ab, &prod)?;
            if d.is_finite() {
                debug_assert!(
                    (i - d).abs() < 1e-7,
                    "mutual information {i} differs from relative-entropy form {d}"
                );
            }
        }
    }
    Ok(i)
}

/// Relative entropy D(ρ‖σ) in bits; +∞ when supp(ρ) ⊄ supp(σ).
///
/// Debug builds assert Pinsker's inequality on every finite call.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> QResult<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QError::DimensionMismatch(
            "relative entropy needs equal dimensions".into(),
        ));
    }
    let (svals, svecs) = linalg::eigh(&sigma.matrix);
    // Weight of ρ outside σ's support.
    let mut outside = 0.0;
    for (j, &s) in svals.iter().enumerate() {
        if s <= EIG_CLIP {
            let v = svecs.column(j);
            let mut w = Complex64::new(0.0, 0.0);
            for r in 0..rho.dim() {
                for c in 0..rho.dim() {
                    w += v[r].conj() * rho.matrix[(r, c)] * v[c];
                }
            }
            outside += w.re;
        }
    }
    if outside > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let (rvals, rvecs) = linalg::eigh(&rho.matrix);
    let mut d = 0.0;
    for (i, &l) in rvals.iter().enumerate() {
        if l > EIG_CLIP {
            d += l * l.log2();
        }
        let _ = i;
    }
    // −tr ρ log σ evaluated in σ's eigenbasis.
    for (j, &s) in svals.iter().enumerate() {
        if s <= EIG_CLIP {
            continue;
        }
        let v = svecs.column(j);
        let mut w = 0.0;
        for (i, &l) in rvals.iter().enumerate() {
            if l <= EIG_CLIP {
                continue;
            }
            let overlap: Complex64 = (0..rho.dim()).map(|r| v[r].conj() * rvecs[(r, i)]).sum();
            w += l * overlap.norm_sqr();
        }
        d -= w * s.log2();
    }
    let d = d.max(0.0);
    if cfg!(debug_assertions) && rho.layout.ids() == sigma.layout.ids() {
        let td = qcore::trace_distance(rho, sigma)?;
        debug_assert!(
            td <= (2.0 * std::f64::consts::LN_2 * d).sqrt() + 1e-7,
            "Pinsker violated: ‖ρ−σ‖₁ = {td}, D = {d}"
        );
    }
    Ok(d)
}

/// Binary entropy h(x) with h(0) = h(1) = 0.
pub fn binary_entropy(x: f64) -> QResult<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(QError::InvalidArgument(format!(
            "binary entropy argument {x} outside [0,1]"
        )));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Measures the named qubit register in the computational (`hadamard =
/// false`) or Hadamard basis, recording the outcome in a fresh classical
/// register `z_id` placed first in the output layout.
pub fn measure_and_record(
    psi: &PureState,
    r_id: &str,
    z_id: &str,
    hadamard: bool,
) -> QResult<DensityOperator> {
    let pos = psi.layout.position(r_id)?;
    if psi.layout.registers()[pos].dim != 2 {
        return Err(QError::InvalidArgument(format!(
            "register `{r_id}` is not a qubit"
        )));
    }
    let mut work = psi.clone();
    if hadamard {
        let h = qcore::one_qubit_op(r_id, qcore::Holder::Env, &qcore::hadamard());
        work = qcore::apply_on_registers(&work, &h, &[r_id.to_string()], None, usize::MAX)?;
    }
    let stride = work.layout.stride(pos);
    let dim_rest = work.dim() / 2;
    // Branch vectors with R removed, indexed by outcome.
    let mut branches = vec![vec![Complex64::new(0.0, 0.0); dim_rest]; 2];
    for (i, amp) in work.amps.iter().enumerate() {
        let z = (i / stride) % 2;
        let prefix = i / (stride * 2);
        let reduced = prefix * stride + (i % stride);
        branches[z][reduced] = *amp;
    }
    let mut rest_regs: Vec<Register> = work.layout.registers().to_vec();
    rest_regs.remove(pos);
    let mut regs = vec![Register::qubit(z_id, qcore::Holder::Referee)];
    regs.extend(rest_regs);
    let layout = RegisterLayout::new(regs)?;
    let mut m = CMatrix::zeros(2 * dim_rest, 2 * dim_rest);
    for z in 0..2 {
        for i in 0..dim_rest {
            for j in 0..dim_rest {
                m[(z * dim_rest + i, z * dim_rest + j)] = branches[z][i] * branches[z][j].conj();
            }
        }
    }
    Ok(DensityOperator::new_unchecked(layout, m))
}

/// Complementary-information tradeoff for a single measured qubit R of a
/// tripartite pure state on (R, E, F): returns
/// (S(Z|E) after a computational measurement,
///  S(Z|F) after a Hadamard measurement,
///  their sum minus 1).
///
/// The sum never drops below 1 (up to numerical tolerance).
pub fn check_cit(
    psi: &PureState,
    r_id: &str,
    e_ids: &[String],
    f_ids: &[String],
) -> QResult<(f64, f64, f64)> {
    let rho_c = measure_and_record(psi, r_id, "__z", false)?;
    let rho_h = measure_and_record(psi, r_id, "__z", true)?;
    let z = vec!["__z".to_string()];
    let s_c = conditional_entropy(&rho_c, &z, e_ids)?;
    let s_h = conditional_entropy(&rho_h, &z, f_ids)?;
    Ok((s_c, s_h, s_c + s_h - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cf;
    use crate::qcore::Holder;

    fn diag_density(p: &[f64]) -> DensityOperator {
        let d = p.len();
        let layout = RegisterLayout::new(vec![Register::new("q", d, Holder::Alice)]).unwrap();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in p.iter().enumerate() {
            m[(i, i)] = cf(v);
        }
        DensityOperator::new_unchecked(layout, m)
    }

    #[test]
    fn entropy_of_pure_state_is_zero() {
        assert!(von_neumann_entropy(&diag_density(&[1.0, 0.0])).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_maximally_mixed_qubit_is_one() {
        assert!((von_neumann_entropy(&diag_density(&[0.5, 0.5])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_matches_binary_entropy_oracle() {
        let s = von_neumann_entropy(&diag_density(&[0.75, 0.25]));
        let h = binary_entropy(0.25).unwrap();
        assert!((s - h).abs() < 1e-12);
        assert!((s - 0.811278).abs() < 1e-6);
    }

    fn two_qubit_layout() -> RegisterLayout {
        RegisterLayout::new(vec![
            Register::qubit("a", Holder::Alice),
            Register::qubit("b", Holder::Bob),
        ])
        .unwrap()
    }

    fn bell_density() -> DensityOperator {
        qcore::bell_pair("a", Holder::Alice, "b", Holder::Bob, 0)
            .unwrap()
            .to_density()
    }

    fn classically_correlated() -> DensityOperator {
        // (|00><00| + |11><11|)/2
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = cf(0.5);
        m[(3, 3)] = cf(0.5);
        DensityOperator::new_unchecked(two_qubit_layout(), m)
    }

    #[test]
    fn conditional_entropy_of_bell_pair_is_minus_one() {
        let s = conditional_entropy(&bell_density(), &["a".into()], &["b".into()]).unwrap();
        assert!((s + 1.0).abs() < 1e-9);
    }

    #[test]
    fn conditional_entropy_of_product_is_zero() {
        // |0><0|_A ⊗ (I/2)_B
        let a = PureState::basis(
            RegisterLayout::new(vec![Register::qubit("a", Holder::Alice)]).unwrap(),
            0,
        )
        .unwrap()
        .to_density();
        let b = DensityOperator::maximally_mixed(
            RegisterLayout::new(vec![Register::qubit("b", Holder::Bob)]).unwrap(),
        );
        let rho = a.tensor(&b).unwrap();
        let s = conditional_entropy(&rho, &["a".into()], &["b".into()]).unwrap();
        assert!(s.abs() < 1e-9);
    }

    #[test]
    fn conditional_entropy_of_classical_correlation_is_zero() {
        let s =
            conditional_entropy(&classically_correlated(), &["a".into()], &["b".into()]).unwrap();
        assert!(s.abs() < 1e-9);
    }

    #[test]
    fn mutual_information_values() {
        // product: 0, Bell: 2, classically correlated: 1
        let a = PureState::basis(
            RegisterLayout::new(vec![Register::qubit("a", Holder::Alice)]).unwrap(),
            0,
        )
        .unwrap()
        .to_density();
        let b = PureState::basis(
            RegisterLayout::new(vec![Register::qubit("b", Holder::Bob)]).unwrap(),
            0,
        )
        .unwrap()
        .to_density();
        let prod = a.tensor(&b).unwrap();
        assert!(mutual_information(&prod, &["a".into()], &["b".into()])
            .unwrap()
            .abs()
            < 1e-9);
        assert!(
            (mutual_information(&bell_density(), &["a".into()], &["b".into()]).unwrap() - 2.0)
                .abs()
                < 1e-9
        );
        assert!(
            (mutual_information(&classically_correlated(), &["a".into()], &["b".into()]).unwrap()
                - 1.0)
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn mutual_information_nonnegative_on_random_states() {
        let layout = RegisterLayout::new(vec![
            Register::qubit("a", Holder::Alice),
            Register::qubit("b", Holder::Bob),
        ])
        .unwrap();
        for trial in 0..50u64 {
            let mut rng = crate::rng::stream(5100, trial);
            let rho =
                DensityOperator::new_unchecked(layout.clone(), crate::rng::random_density(&mut rng, 4));
            let i = mutual_information(&rho, &["a".into()], &["b".into()]).unwrap();
            assert!(i >= -1e-9);
        }
    }

    #[test]
    fn relative_entropy_values() {
        let rho = diag_density(&[1.0, 0.0]);
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);
        let sigma = diag_density(&[0.0, 1.0]);
        assert!(relative_entropy(&rho, &sigma).unwrap().is_infinite());
        let mixed = diag_density(&[0.5, 0.5]);
        // D(|0><0| ‖ I/2) = 1
        assert!((relative_entropy(&rho, &mixed).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn binary_entropy_values() {
        assert!(binary_entropy(0.0).unwrap().abs() < 1e-12);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((binary_entropy(0.09).unwrap() - 0.436).abs() < 1e-3);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn pinsker_on_random_finite_pairs() {
        for d in [2usize, 4] {
            let layout = RegisterLayout::new(vec![Register::new("q", d, Holder::Alice)]).unwrap();
            for trial in 0..100u64 {
                let mut rng = crate::rng::stream(4200 + d as u64, trial);
                let a = DensityOperator::new_unchecked(
                    layout.clone(),
                    crate::rng::random_density(&mut rng, d),
                );
                let b = DensityOperator::new_unchecked(
                    layout.clone(),
                    crate::rng::random_density(&mut rng, d),
                );
                let dd = relative_entropy(&a, &b).unwrap();
                if dd.is_finite() {
                    let td = qcore::trace_distance(&a, &b).unwrap();
                    assert!(td <= (2.0 * std::f64::consts::LN_2 * dd).sqrt() + 1e-7);
                }
            }
        }
    }

    fn three_qubit_state(amps: Vec<Complex64>) -> PureState {
        let layout = RegisterLayout::new(vec![
            Register::qubit("r", Holder::Referee),
            Register::qubit("e", Holder::Alice),
            Register::qubit("f", Holder::Bob),
        ])
        .unwrap();
        PureState::new(layout, amps).unwrap()
    }

    #[test]
    fn cit_saturating_case() {
        // |Φ+⟩_{RE} ⊗ |0⟩_F: computational measurement of R is perfectly
        // correlated with E; the Hadamard outcome is uniform and independent
        // of F.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0] = cf(h); // |000>
        amps[6] = cf(h); // |110>
        let psi = three_qubit_state(amps);
        let (s_c, s_h, slack) =
            check_cit(&psi, "r", &["e".to_string()], &["f".to_string()]).unwrap();
        assert!(s_c.abs() < 1e-9);
        assert!((s_h - 1.0).abs() < 1e-9);
        assert!(slack.abs() < 1e-9);
    }

    #[test]
    fn cit_product_case() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0] = cf(1.0);
        let psi = three_qubit_state(amps);
        let (s_c, s_h, slack) =
            check_cit(&psi, "r", &["e".to_string()], &["f".to_string()]).unwrap();
        assert!(s_c.abs() < 1e-9);
        assert!((s_h - 1.0).abs() < 1e-9);
        assert!(slack.abs() < 1e-9);
    }

    #[test]
    fn cit_on_random_tripartite_states() {
        for trial in 0..100u64 {
            let mut rng = crate::rng::stream(777, trial);
            let v = crate::rng::random_state_vector(&mut rng, 8);
            let psi = three_qubit_state(v.iter().copied().collect());
            let (_, _, slack) =
                check_cit(&psi, "r", &["e".to_string()], &["f".to_string()]).unwrap();
            assert!(slack >= -1e-9, "CIT violated with slack {slack}");
        }
    }

    #[test]
    fn predictable_measurement_has_low_conditional_entropy() {
        // States where a computational measurement of P is predictable from
        // M and from M' with probability ≥ 1−ε: S(Z|M') ≤ h(ε).
        for &eps in &[0.02f64, 0.09, 0.25] {
            let a = (1.0 - eps).sqrt();
            let b = eps.sqrt();
            let layout = RegisterLayout::new(vec![
                Register::qubit("p", Holder::Referee),
                Register::qubit("m", Holder::Alice),
                Register::qubit("mp", Holder::Bob),
            ])
            .unwrap();
            // (√(1−ε)|0⟩ + √ε|1⟩)_P ⊗ |00⟩: constant guess succeeds with 1−ε.
            let mut amps = vec![Complex64::new(0.0, 0.0); 8];
            amps[0] = cf(a);
            amps[4] = cf(b);
            let psi = PureState::new(layout.clone(), amps).unwrap();
            let rho_c = measure_and_record(&psi, "p", "z", false).unwrap();
            let s = conditional_entropy(&rho_c, &["z".into()], &["mp".into()]).unwrap();
            let bound = binary_entropy(eps).unwrap();
            assert!(s <= bound + 1e-7, "S(Z|M') = {s} > h({eps}) = {bound}");

            // Correlated variant: M and M' both copy P's basis value.
            let mut amps = vec![Complex64::new(0.0, 0.0); 8];
            amps[0] = cf(a);
            amps[7] = cf(b);
            let psi = PureState::new(layout, amps).unwrap();
            let rho_c = measure_and_record(&psi, "p", "z", false).unwrap();
            let s = conditional_entropy(&rho_c, &["z".into()], &["mp".into()]).unwrap();
            assert!(s <= 1e-7, "perfectly predictable case should have S ~ 0");
        }
    }
}
