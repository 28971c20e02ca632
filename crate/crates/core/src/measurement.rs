//! Training pilots and noisy downlink observations `y_k = X Ψ w_k + n_k`.

use rand::Rng;

use crate::signal_model::{complex_normal, Dictionary, SparseVector};
use crate::{CMatrix, CVector, Complex64, Error, Result};

/// `T × N` training matrix broadcast by the base station.
#[derive(Debug, Clone)]
pub struct PilotMatrix {
    entries: CMatrix,
}

impl PilotMatrix {
    pub fn from_entries(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn num_slots(&self) -> usize {
        self.entries.nrows()
    }
}

/// i.i.d. `CN(0, 1/T)` pilots.
pub fn sample_pilots<R: Rng + ?Sized>(rng: &mut R, num_slots: usize, num_antennas: usize) -> Result<PilotMatrix> {
    if num_slots == 0 || num_antennas == 0 {
        return Err(Error::Config(format!(
            "pilot matrix must be non-empty, got {num_slots}x{num_antennas}"
        )));
    }
    let variance = 1.0 / num_slots as f64;
    let entries = CMatrix::from_fn(num_slots, num_antennas, |_, _| complex_normal(rng, variance));
    Ok(PilotMatrix { entries })
}

/// Observations of all users for one pilot transmission.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    pub per_user: Vec<CVector>,
    pub noise_variance: Vec<f64>,
    pub snr_db: Vec<f64>,
    /// `A = X Ψ`, shared by every user.
    pub sensing_matrix: CMatrix,
}

impl MeasurementSet {
    pub fn num_slots(&self) -> usize {
        self.sensing_matrix.nrows()
    }
}

/// Effective sensing matrix `X Ψ`.
pub fn sensing_matrix(pilots: &PilotMatrix, dict: &Dictionary) -> Result<CMatrix> {
    if pilots.entries.ncols() != dict.num_antennas() {
        return Err(Error::Dimension(format!(
            "pilots drive {} antennas, dictionary has {}",
            pilots.entries.ncols(),
            dict.num_antennas()
        )));
    }
    Ok(&pilots.entries * dict.atoms())
}

/// Noise variance that puts the received signal `s` at `snr_db`, measured
/// as average signal power per slot over noise power per slot. Infinite SNR
/// means noiseless.
pub fn calibrated_noise_variance(signal: &CVector, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    let per_slot = signal.norm_squared() / signal.len() as f64;
    per_slot / 10f64.powf(snr_db / 10.0)
}

/// Forms every user's noisy observation. Noise is calibrated per user and
/// per realisation; pass `f64::INFINITY` for a noiseless user.
pub fn measure<R: Rng + ?Sized>(
    rng: &mut R,
    pilots: &PilotMatrix,
    dict: &Dictionary,
    w: &[SparseVector],
    snr_db: &[f64],
) -> Result<MeasurementSet> {
    let a = sensing_matrix(pilots, dict)?;
    observe(rng, a, w, snr_db)
}

/// [`measure`] with a precomputed sensing matrix `A = X Ψ`.
pub fn observe<R: Rng + ?Sized>(
    rng: &mut R,
    a: CMatrix,
    w: &[SparseVector],
    snr_db: &[f64],
) -> Result<MeasurementSet> {
    if w.len() != snr_db.len() {
        return Err(Error::Dimension(format!(
            "{} coefficient vectors but {} SNR values",
            w.len(),
            snr_db.len()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut per_user = Vec::with_capacity(w.len());
    let mut noise_variance = Vec::with_capacity(w.len());
    for (k, (wk, &snr)) in w.iter().zip(snr_db).enumerate() {
        if wk.length != a.ncols() {
            return Err(Error::Dimension(format!(
                "user {k}: coefficient vector has length {}, dictionary has {} atoms",
                wk.length,
                a.ncols()
            )));
        }
        if snr.is_nan() {
            return Err(Error::Config(format!("user {k}: SNR is NaN")));
        }
        let mut y = CVector::zeros(a.nrows());
        for (&idx, &v) in wk.support.iter().zip(&wk.values) {
            y.axpy(v, &a.column(idx), one);
        }
        let sigma2 = calibrated_noise_variance(&y, snr);
        if sigma2 > 0.0 {
            for v in y.iter_mut() {
                *v += complex_normal(rng, sigma2);
            }
        }
        per_user.push(y);
        noise_variance.push(sigma2);
    }
    Ok(MeasurementSet {
        per_user,
        noise_variance,
        snr_db: snr_db.to_vec(),
        sensing_matrix: a,
    })
}
