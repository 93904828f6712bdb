use crate::error::{QError, QResult};
use crate::linalg;
use crate::qcore::channel::{choi_of_channel, ChannelOp};
use crate::qcore::state::DensityOperator;
use crate::TOL;

fn check_same_shape(a: &DensityOperator, b: &DensityOperator) -> QResult<()> {
    if a.layout.ids() != b.layout.ids() || a.dim() != b.dim() {
        return Err(QError::DimensionMismatch(
            "density operators live on different layouts".into(),
        ));
    }
    Ok(())
}

/// One-norm distance ‖a − b‖₁ (twice the conventional trace distance;
/// callers halve where needed).
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> QResult<f64> {
    check_same_shape(a, b)?;
    Ok(linalg::trace_norm(&(&a.matrix - &b.matrix)))
}

/// Uhlmann fidelity (tr √(√a·b·√a))² = ‖√a·√b‖₁².
///
/// In debug builds every call cross-checks the Fuchs–van de Graaf sandwich
/// against the trace distance.
pub fn fidelity(a: &DensityOperator, b: &DensityOperator) -> QResult<f64> {
    check_same_shape(a, b)?;
    let clip = 1e-12;
    let (va, _) = linalg::eigh(&a.matrix);
    if va.first().map(|&m| m < -1e-7).unwrap_or(false) {
        return Err(QError::InvalidDensity(format!(
            "fidelity input has eigenvalue {:.3e}",
            va[0]
        )));
    }
    let sa = linalg::sqrtm_psd(&a.matrix, clip);
    let sb = linalg::sqrtm_psd(&b.matrix, clip);
    let f = linalg::trace_norm(&(&sa * &sb)).powi(2);
    let f = f.clamp(0.0, 1.0 + 1e-9).min(1.0);
    if cfg!(debug_assertions) {
        let half_td = 0.5 * trace_distance(a, b)?;
        let lo = 1.0 - f.sqrt();
        let hi = (1.0 - f).max(0.0).sqrt();
        debug_assert!(
            lo - TOL <= half_td && half_td <= hi + TOL,
            "Fuchs-van de Graaf violated: 1-sqrt(F)={lo}, T={half_td}, sqrt(1-F)={hi}"
        );
    }
    Ok(f)
}

/// Diamond-distance sandwich derived from Choi matrices.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DistanceBounds {
    /// ‖J₁ − J₂‖₁ of the trace-one Choi states; a diamond-norm lower bound.
    pub lower: f64,
    /// d_in · lower; a diamond-norm upper bound.
    pub upper: f64,
    /// Choi matrices agree entrywise within 1e-9, certifying diamond
    /// distance zero at tolerance.
    pub exact_zero: bool,
}

impl DistanceBounds {
    pub fn from_chois(j1: &linalg::CMatrix, j2: &linalg::CMatrix, d_in: usize) -> QResult<Self> {
        if j1.shape() != j2.shape() {
            return Err(QError::DimensionMismatch(
                "Choi matrices have different shapes".into(),
            ));
        }
        let dev = linalg::max_abs_diff(j1, j2);
        let lower = linalg::trace_norm(&(j1 - j2));
        Ok(DistanceBounds {
            lower,
            upper: d_in as f64 * lower,
            exact_zero: dev <= TOL,
        })
    }

    /// Conservative scalar error: the upper bound, or exactly 0 when
    /// certified.
    pub fn epsilon(&self) -> f64 {
        if self.exact_zero {
            0.0
        } else {
            self.upper
        }
    }
}

/// Diamond-norm sandwich between two channels with matching in/out
/// dimensions.
pub fn channel_distance_bounds(ch1: &ChannelOp, ch2: &ChannelOp) -> QResult<DistanceBounds> {
    let c1 = choi_of_channel(ch1)?;
    let c2 = choi_of_channel(ch2)?;
    if c1.d_in != c2.d_in || c1.d_out != c2.d_out {
        return Err(QError::DimensionMismatch(
            "channels have different in/out dimensions".into(),
        ));
    }
    DistanceBounds::from_chois(&c1.matrix, &c2.matrix, c1.d_in)
}
