//! Special functions: Kummer `M`, generalized Laguerre `L_ν^α`, and
//! parabolic cylinder `D_ν`.

mod cylinder;
mod kummer;

pub use cylinder::{cylinder_d, cylinder_d_with, CylinderValue, CYLINDER_MAX_ARG, CYLINDER_NU_RANGE};
pub use kummer::{
    kummer_log_ratio, kummer_m, kummer_m_prime, kummer_scaled, laguerre, laguerre_scaled, KummerValue,
    KUMMER_MAX_ARG,
};
