use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::{measure_power, ComplexSeries};

/// Factor that brings `jammer` to `jsr_db` above `signal`, both measured
/// as mean `|x|²` over the frame.
pub fn jsr_scale<T: Real>(signal: &ComplexSeries<T>, jammer: &ComplexSeries<T>, jsr_db: f64) -> Result<T> {
    signal.check_compatible(jammer)?;
    let ps = measure_power(signal).to_f64_lossy();
    let pj = measure_power(jammer).to_f64_lossy();
    if ps <= 0.0 {
        return Err(Error::ZeroPower("signal"));
    }
    if pj <= 0.0 {
        return Err(Error::ZeroPower("jammer"));
    }
    if !jsr_db.is_finite() {
        return Err(Error::invalid(format!("JSR must be finite, got {jsr_db}")));
    }
    Ok(T::lit((ps * 10f64.powf(jsr_db / 10.0) / pj).sqrt()))
}

/// `signal + g·jammer` with `g` chosen so that `10 log10(P_j / P_s) = jsr_db`.
pub fn mix_at_jsr<T: Real>(
    signal: &ComplexSeries<T>,
    jammer: &ComplexSeries<T>,
    jsr_db: f64,
) -> Result<ComplexSeries<T>> {
    let g = jsr_scale(signal, jammer, jsr_db)?;
    signal.try_add(&jammer.scaled(g))
}
