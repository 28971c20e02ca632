//! Array geometry, angular dictionaries and the global/common joint-sparsity
//! model of the users' channels.

use std::f64::consts::PI;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Uniform linear array at the base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    num_antennas: usize,
    element_spacing: f64,
}

impl ArrayConfig {
    /// `element_spacing` is the antenna spacing in wavelengths (d / λ).
    pub fn new(num_antennas: usize, element_spacing: f64) -> Result<Self> {
        if num_antennas == 0 {
            return Err(Error::Config("array needs at least one antenna".into()));
        }
        if !(element_spacing > 0.0 && element_spacing.is_finite()) {
            return Err(Error::Config(format!(
                "element spacing must be positive, got {element_spacing}"
            )));
        }
        Ok(Self {
            num_antennas,
            element_spacing,
        })
    }

    /// Half-wavelength spaced array.
    pub fn half_wavelength(num_antennas: usize) -> Result<Self> {
        Self::new(num_antennas, 0.5)
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn element_spacing(&self) -> f64 {
        self.element_spacing
    }

    /// Inter-element phase progression `2π (d/λ) sin θ`.
    pub fn spatial_phase(&self, angle: f64) -> f64 {
        2.0 * PI * self.element_spacing * angle.sin()
    }
}

/// Normalised array response for an inter-element phase step.
fn ula_response(num_antennas: usize, phase: f64) -> impl Iterator<Item = Complex64> {
    let scale = 1.0 / (num_antennas as f64).sqrt();
    (0..num_antennas).map(move |n| Complex64::from_polar(scale, phase * n as f64))
}

/// Unit-norm ULA steering vector `a(θ)`; element `n` is
/// `exp(j 2π n (d/λ) sin θ) / √N`.
pub fn steering_vector(cfg: &ArrayConfig, angle: f64) -> CVector {
    CVector::from_iterator(
        cfg.num_antennas,
        ula_response(cfg.num_antennas, cfg.spatial_phase(angle)),
    )
}

/// How the `L̂` atoms of a dictionary are placed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPolicy {
    /// Uniform in spatial phase over `[-π, π)`: the (overcomplete) DFT grid.
    #[default]
    SpatialFrequency,
    /// Uniform in departure angle over `[-π, π)`.
    UniformAngle,
}

/// Sparsifying dictionary `Ψ` (N × L̂) with unit-norm columns.
#[derive(Debug, Clone)]
pub struct Dictionary {
    atoms: CMatrix,
    grid_angles: Vec<f64>,
}

impl Dictionary {
    pub fn atoms(&self) -> &CMatrix {
        &self.atoms
    }

    /// Departure angle (radians) represented by each atom. On the DFT grid
    /// phases outside the visible region (possible when d < λ/2) are clamped
    /// to ±π/2.
    pub fn grid_angles(&self) -> &[f64] {
        &self.grid_angles
    }

    pub fn num_antennas(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.ncols()
    }

    /// Antenna-domain channel `Ψ w`.
    pub fn synthesize(&self, w: &SparseVector) -> CVector {
        let mut h = CVector::zeros(self.num_antennas());
        for (&idx, &value) in w.support.iter().zip(&w.values) {
            h.axpy(value, &self.atoms.column(idx), Complex64::new(1.0, 0.0));
        }
        h
    }
}

/// Builds an `N × L̂` dictionary of steering vectors on the requested grid.
pub fn build_dictionary(cfg: &ArrayConfig, num_atoms: usize, grid: GridPolicy) -> Result<Dictionary> {
    if num_atoms == 0 {
        return Err(Error::Config("dictionary needs at least one atom".into()));
    }
    let n = cfg.num_antennas;
    let mut atoms = CMatrix::zeros(n, num_atoms);
    let mut grid_angles = Vec::with_capacity(num_atoms);
    let step = 2.0 * PI / num_atoms as f64;
    for l in 0..num_atoms {
        let grid_point = -PI + step * l as f64;
        let (phase, angle) = match grid {
            GridPolicy::SpatialFrequency => {
                let sine = grid_point / (2.0 * PI * cfg.element_spacing);
                (grid_point, sine.clamp(-1.0, 1.0).asin())
            }
            GridPolicy::UniformAngle => (cfg.spatial_phase(grid_point), grid_point),
        };
        for (dst, v) in atoms.column_mut(l).iter_mut().zip(ula_response(n, phase)) {
            *dst = v;
        }
        grid_angles.push(angle);
    }
    Ok(Dictionary { atoms, grid_angles })
}

/// Sorted, duplicate-free set of atom indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn insert(&mut self, idx: usize) -> bool {
        match self.0.binary_search(&idx) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, idx);
                true
            }
        }
    }

    /// `|self ∩ other|`
    pub fn intersection_len(&self, other: &SupportSet) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// `|self \ other|`
    pub fn difference_len(&self, other: &SupportSet) -> usize {
        self.len() - self.intersection_len(other)
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.intersection_len(other) == self.len()
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        self.iter().chain(other.iter()).copied().collect()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for SupportSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl From<Vec<usize>> for SupportSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[usize; N]> for SupportSet {
    fn from(v: [usize; N]) -> Self {
        v.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a SupportSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Whether the global and common supports may share atoms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapPolicy {
    #[default]
    Disjoint,
    AllowOverlap,
}

/// One group of users sharing a common support set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    /// Size of the group's common support, `L_c`.
    pub sparsity: usize,
    /// User indices belonging to the group.
    pub members: Vec<usize>,
}

/// Global support `S^g`, group supports `S^{c_j}` and group membership.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSparsityProfile {
    num_atoms: usize,
    global_support: SupportSet,
    common_supports: Vec<SupportSet>,
    group_members: Vec<SupportSet>,
    user_interest: Vec<Vec<usize>>,
}

impl JointSparsityProfile {
    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn num_users(&self) -> usize {
        self.user_interest.len()
    }

    pub fn global_support(&self) -> &SupportSet {
        &self.global_support
    }

    pub fn common_supports(&self) -> &[SupportSet] {
        &self.common_supports
    }

    pub fn group_members(&self) -> &[SupportSet] {
        &self.group_members
    }

    /// Groups `I_k` that user `k` belongs to.
    pub fn user_interest(&self, user: usize) -> &[usize] {
        &self.user_interest[user]
    }

    /// Full support `S_k = S^g ∪ ⋃_{j ∈ I_k} S^{c_j}` of user `k`.
    pub fn user_support(&self, user: usize) -> SupportSet {
        self.user_interest[user]
            .iter()
            .fold(self.global_support.clone(), |acc, &j| {
                acc.union(&self.common_supports[j])
            })
    }
}

/// Draws a joint-sparsity profile for `num_users` users.
pub fn sample_profile<R: Rng + ?Sized>(
    rng: &mut R,
    num_atoms: usize,
    global_sparsity: usize,
    groups: &[GroupSpec],
    num_users: usize,
    policy: OverlapPolicy,
) -> Result<JointSparsityProfile> {
    let mut user_interest = vec![Vec::new(); num_users];
    for (j, group) in groups.iter().enumerate() {
        for &user in &group.members {
            if user >= num_users {
                return Err(Error::Config(format!(
                    "group {j} lists user {user}, but there are only {num_users} users"
                )));
            }
            if !user_interest[user].contains(&j) {
                user_interest[user].push(j);
            }
        }
    }

    let sizes = std::iter::once(global_sparsity).chain(groups.iter().map(|g| g.sparsity));
    let mut supports: Vec<SupportSet> = match policy {
        OverlapPolicy::Disjoint => {
            let total: usize = sizes.clone().sum();
            if total > num_atoms {
                return Err(Error::Config(format!(
                    "disjoint supports need {total} atoms but the dictionary has {num_atoms}"
                )));
            }
            let drawn = index::sample(rng, num_atoms, total).into_vec();
            let mut offset = 0;
            sizes
                .map(|size| {
                    let set = drawn[offset..offset + size].iter().copied().collect();
                    offset += size;
                    set
                })
                .collect()
        }
        OverlapPolicy::AllowOverlap => {
            let sizes: Vec<usize> = sizes.collect();
            if let Some(&too_big) = sizes.iter().find(|&&s| s > num_atoms) {
                return Err(Error::Config(format!(
                    "support of size {too_big} exceeds the {num_atoms} dictionary atoms"
                )));
            }
            sizes
                .into_iter()
                .map(|size| index::sample(rng, num_atoms, size).into_iter().collect())
                .collect()
        }
    };
    let global_support = supports.remove(0);
    Ok(JointSparsityProfile {
        num_atoms,
        global_support,
        common_supports: supports,
        group_members: groups.iter().map(|g| g.members.iter().copied().collect()).collect(),
        user_interest,
    })
}

/// Distribution of the non-zero angular coefficients.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueLaw {
    /// Real `N(0, 1)`.
    #[default]
    RealGaussian,
    /// Circularly-symmetric `CN(0, 1)`.
    ComplexGaussian,
}

impl ValueLaw {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Complex64 {
        match self {
            ValueLaw::RealGaussian => Complex64::new(rng.sample(StandardNormal), 0.0),
            ValueLaw::ComplexGaussian => complex_normal(rng, 1.0),
        }
    }
}

/// One draw of `CN(0, variance)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(scale * re, scale * im)
}

/// Angular-domain representation `w` of one user's channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub length: usize,
    pub support: SupportSet,
    /// Coefficients aligned with `support`.
    pub values: Vec<Complex64>,
}

impl SparseVector {
    pub fn zeros(length: usize) -> Self {
        Self {
            length,
            support: SupportSet::new(),
            values: Vec::new(),
        }
    }

    pub fn to_dense(&self) -> CVector {
        let mut dense = CVector::zeros(self.length);
        for (&idx, &v) in self.support.iter().zip(&self.values) {
            dense[idx] = v;
        }
        dense
    }
}

/// Draws one coefficient vector per user on that user's profile support.
pub fn sample_sparse_vectors<R: Rng + ?Sized>(
    rng: &mut R,
    profile: &JointSparsityProfile,
    law: ValueLaw,
) -> Vec<SparseVector> {
    (0..profile.num_users())
        .map(|k| {
            let support = profile.user_support(k);
            let values = support.iter().map(|_| law.sample(rng)).collect();
            SparseVector {
                length: profile.num_atoms(),
                support,
                values,
            }
        })
        .collect()
}

/// A single propagation sub-path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub angle: f64,
    pub gain: Complex64,
}

/// A channel in both the antenna and (when on-grid) the angular domain.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub antenna_domain: CVector,
    pub angular_domain: Option<SparseVector>,
    pub paths: Vec<PathComponent>,
}

impl ChannelRealization {
    /// Sum of steering vectors weighted by the path gains.
    pub fn from_paths(cfg: &ArrayConfig, paths: Vec<PathComponent>) -> Self {
        let mut h = CVector::zeros(cfg.num_antennas());
        for p in &paths {
            h.axpy(p.gain, &steering_vector(cfg, p.angle), Complex64::new(1.0, 0.0));
        }
        Self {
            antenna_domain: h,
            angular_domain: None,
            paths,
        }
    }

    /// Channel whose paths sit exactly on dictionary atoms.
    pub fn on_grid(dict: &Dictionary, w: SparseVector) -> Self {
        let paths = w
            .support
            .iter()
            .zip(&w.values)
            .map(|(&idx, &gain)| PathComponent {
                angle: dict.grid_angles()[idx],
                gain,
            })
            .collect();
        Self {
            antenna_domain: dict.synthesize(&w),
            angular_domain: Some(w),
            paths,
        }
    }
}

/// Departure-angle distribution for GSCM sub-paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleLaw {
    /// Every sub-path angle i.i.d. uniform on `[low, high)`.
    Uniform { low: f64, high: f64 },
    /// Cluster centres uniform on `[low, high)`, sub-paths uniform within
    /// `±spread` of their centre.
    Clustered { low: f64, high: f64, spread: f64 },
}

/// Complex sub-path gain distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainLaw {
    ComplexGaussian { variance: f64 },
    Unit,
}

/// Geometry-based stochastic channel with `clusters × subpaths` paths.
pub fn gscm_channel<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &ArrayConfig,
    clusters: usize,
    subpaths: usize,
    angle_law: AngleLaw,
    gain_law: GainLaw,
) -> Result<ChannelRealization> {
    if clusters == 0 || subpaths == 0 {
        return Err(Error::Config(
            "GSCM needs at least one cluster and one sub-path".into(),
        ));
    }
    let mut paths = Vec::with_capacity(clusters * subpaths);
    for _ in 0..clusters {
        let centre = match angle_law {
            AngleLaw::Uniform { .. } => 0.0,
            AngleLaw::Clustered { low, high, .. } => rng.gen_range(low..high),
        };
        for _ in 0..subpaths {
            let angle = match angle_law {
                AngleLaw::Uniform { low, high } => rng.gen_range(low..high),
                AngleLaw::Clustered { spread, .. } => centre + rng.gen_range(-spread..=spread),
            };
            let gain = match gain_law {
                GainLaw::ComplexGaussian { variance } => complex_normal(rng, variance),
                GainLaw::Unit => Complex64::new(1.0, 0.0),
            };
            paths.push(PathComponent { angle, gain });
        }
    }
    Ok(ChannelRealization::from_paths(cfg, paths))
}
