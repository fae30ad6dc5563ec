//! Truncated single-excitation state spaces of the two atom–cavity sites.
//!
//! Site A holds the qubit to be teleported in the Zeeman pair {gL, gR}; the
//! drive and the two circularly polarized cavity modes connect it to the
//! excited pair {eL, eR} and to the photonic kets g0|1,0⟩ and g0|0,1⟩
//! (photon numbers ⟨n_L, n_R⟩). Site B starts in g0′ and branches through e0
//! into gL|0,1⟩ and gR|1,0⟩, entangling the atom with the polarization of
//! its emitted photon.
//!
//! Only kets reachable from the initial states are enumerated: the Alice
//! space has dimension 6 and the Bob space dimension 4, with one total
//! excitation at most (each cavity emits exactly one photon). Population
//! lost to cavity decay or spontaneous emission leaves these spaces and is
//! tracked implicitly as norm loss of the conditional state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Normalization slack for state and qubit checks.
pub const NORM_EPSILON: f64 = 1e-9;

/// Dimension of the Alice single-excitation space.
pub const ALICE_DIM: usize = 6;

/// Dimension of the Bob single-excitation space.
pub const BOB_DIM: usize = 4;

/// Which site a state or pulse belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Site {
    Alice,
    Bob,
}

impl Site {
    /// Dimension of the site's enumerated basis.
    pub fn dim(self) -> usize {
        match self {
            Site::Alice => ALICE_DIM,
            Site::Bob => BOB_DIM,
        }
    }
}

/// Atomic levels that participate at site A. The level e0 is absent: the
/// g0 ↔ e0 transition is electric-dipole forbidden and nothing populates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AliceLevel {
    GL,
    G0,
    GR,
    EL,
    ER,
}

/// Atomic levels that participate at site B; only three transitions couple
/// them (g0′ ↔ e0 by the drive, e0 ↔ gL/gR by the two cavity polarizations).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BobLevel {
    G0Prime,
    E0,
    GL,
    GR,
}

/// Product ket |atomic⟩|n_L, n_R⟩ with at most one excitation in the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisKet<L> {
    pub atomic: L,
    pub n_l: u8,
    pub n_r: u8,
}

impl<L> BasisKet<L> {
    pub const fn new(atomic: L, n_l: u8, n_r: u8) -> Self {
        Self { atomic, n_l, n_r }
    }
}

/// Canonical Alice basis order; all matrices and serializations use it.
pub const ALICE_BASIS: [BasisKet<AliceLevel>; ALICE_DIM] = [
    BasisKet::new(AliceLevel::GL, 0, 0),
    BasisKet::new(AliceLevel::GR, 0, 0),
    BasisKet::new(AliceLevel::EL, 0, 0),
    BasisKet::new(AliceLevel::ER, 0, 0),
    BasisKet::new(AliceLevel::G0, 1, 0),
    BasisKet::new(AliceLevel::G0, 0, 1),
];

/// Canonical Bob basis order.
pub const BOB_BASIS: [BasisKet<BobLevel>; BOB_DIM] = [
    BasisKet::new(BobLevel::G0Prime, 0, 0),
    BasisKet::new(BobLevel::E0, 0, 0),
    BasisKet::new(BobLevel::GL, 0, 1),
    BasisKet::new(BobLevel::GR, 1, 0),
];

fn check_photon_numbers(n_l: u8, n_r: u8) -> Result<()> {
    if n_l > 1 || n_r > 1 || n_l + n_r > 1 {
        return Err(Error::BasisDomain {
            reason: format!(
                "photon numbers (n_L, n_R) = ({n_l}, {n_r}) exceed the single-excitation truncation"
            ),
        });
    }
    Ok(())
}

/// Stable zero-based index of an Alice ket in the canonical order.
pub fn alice_basis_index(ket: &BasisKet<AliceLevel>) -> Result<usize> {
    check_photon_numbers(ket.n_l, ket.n_r)?;
    ALICE_BASIS
        .iter()
        .position(|b| b == ket)
        .ok_or_else(|| Error::BasisDomain {
            reason: format!("{ket:?} is not reachable at site A"),
        })
}

/// Stable zero-based index of a Bob ket in the canonical order.
pub fn bob_basis_index(ket: &BasisKet<BobLevel>) -> Result<usize> {
    check_photon_numbers(ket.n_l, ket.n_r)?;
    BOB_BASIS
        .iter()
        .position(|b| b == ket)
        .ok_or_else(|| Error::BasisDomain {
            reason: format!("{ket:?} is not reachable at site B"),
        })
}

/// Conditional (possibly decayed) state of one site at a fixed time.
///
/// The squared norm starts at 1 and is non-increasing under the
/// non-Hermitian evolution; it may not exceed 1 + [`NORM_EPSILON`].
#[derive(Debug, Clone, PartialEq)]
pub struct SiteState {
    pub site: Site,
    pub amplitudes: Vec<C64>,
    /// Time of validity, seconds.
    pub time: f64,
}

impl SiteState {
    /// Builds a state after checking dimension and the norm ceiling.
    pub fn new(site: Site, amplitudes: Vec<C64>, time: f64) -> Result<Self> {
        if amplitudes.len() != site.dim() {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                reason: format!(
                    "expected dimension {} for {site:?}, got {}",
                    site.dim(),
                    amplitudes.len()
                ),
            });
        }
        let state = Self { site, amplitudes, time };
        let n = state.norm_sq();
        if !(0.0..=1.0 + NORM_EPSILON).contains(&n) || !n.is_finite() {
            return Err(Error::NotNormalized { defect: n - 1.0, tol: NORM_EPSILON });
        }
        Ok(state)
    }

    /// Squared norm Σ|c_i|².
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Normalized qubit amplitudes (α, β) on the {gL, gR} pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QubitRepr", into = "QubitRepr")]
pub struct Qubit {
    alpha: C64,
    beta: C64,
}

/// Serialized face of [`Qubit`]; deserializing re-runs the norm check.
#[derive(Serialize, Deserialize)]
struct QubitRepr {
    alpha: C64,
    beta: C64,
}

impl TryFrom<QubitRepr> for Qubit {
    type Error = Error;

    fn try_from(r: QubitRepr) -> Result<Self> {
        Qubit::new(r.alpha, r.beta)
    }
}

impl From<Qubit> for QubitRepr {
    fn from(q: Qubit) -> Self {
        Self { alpha: q.alpha, beta: q.beta }
    }
}

impl Qubit {
    /// Builds a qubit, rejecting unnormalized amplitudes.
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > NORM_EPSILON || !n.is_finite() {
            return Err(Error::NotNormalized { defect: n - 1.0, tol: NORM_EPSILON });
        }
        Ok(Self { alpha, beta })
    }

    /// The balanced superposition α = β = 1/√2 (the worst case for the
    /// teleportation fidelity, hence the default test point).
    pub fn balanced() -> Self {
        let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: w, beta: w }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// The qubit with the relative sign of β flipped: α·gL − β·gR.
    pub fn phase_flipped(&self) -> Qubit {
        Qubit { alpha: self.alpha, beta: -self.beta }
    }
}

/// α·gL|0,0⟩ + β·gR|0,0⟩ at t = 0, the state carrying the unknown qubit.
pub fn alice_initial_state(q: &Qubit) -> SiteState {
    let mut amps = vec![C64::new(0.0, 0.0); ALICE_DIM];
    amps[0] = q.alpha();
    amps[1] = q.beta();
    SiteState { site: Site::Alice, amplitudes: amps, time: 0.0 }
}

/// Unit amplitude on g0′|0,0⟩ at t = 0, Bob's ready state.
pub fn bob_initial_state() -> SiteState {
    let mut amps = vec![C64::new(0.0, 0.0); BOB_DIM];
    amps[0] = C64::new(1.0, 0.0);
    SiteState { site: Site::Bob, amplitudes: amps, time: 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn canonical_dimensions() {
        assert_eq!(ALICE_BASIS.len(), 6);
        assert_eq!(BOB_BASIS.len(), 4);
        assert_eq!(Site::Alice.dim(), 6);
        assert_eq!(Site::Bob.dim(), 4);
    }

    #[test]
    fn canonical_indices() {
        let k = BasisKet::new(AliceLevel::GL, 0, 0);
        assert_eq!(alice_basis_index(&k).unwrap(), 0);
        let k = BasisKet::new(BobLevel::E0, 0, 0);
        assert_eq!(bob_basis_index(&k).unwrap(), 1);
        let k = BasisKet::new(AliceLevel::G0, 0, 1);
        assert_eq!(alice_basis_index(&k).unwrap(), 5);
    }

    #[test]
    fn index_round_trip() {
        for (i, ket) in ALICE_BASIS.iter().enumerate() {
            assert_eq!(alice_basis_index(ket).unwrap(), i);
        }
        for (i, ket) in BOB_BASIS.iter().enumerate() {
            assert_eq!(bob_basis_index(ket).unwrap(), i);
        }
    }

    #[test]
    fn double_occupation_is_rejected() {
        let k = BasisKet::new(AliceLevel::G0, 1, 1);
        assert!(matches!(alice_basis_index(&k), Err(Error::BasisDomain { .. })));
    }

    #[test]
    fn unreachable_ket_is_rejected() {
        // An Alice photon ket must sit on g0; gL with a photon is unreachable.
        let k = BasisKet::new(AliceLevel::GL, 1, 0);
        assert!(alice_basis_index(&k).is_err());
        // Bob's g0' never coexists with a photon.
        let k = BasisKet::new(BobLevel::G0Prime, 0, 1);
        assert!(bob_basis_index(&k).is_err());
    }

    #[test]
    fn alice_initial_state_places_qubit() {
        let q = Qubit::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let s = alice_initial_state(&q);
        assert_eq!(s.amplitudes[0], C64::new(1.0, 0.0));
        assert!(s.amplitudes[1..].iter().all(|c| c.norm_sqr() == 0.0));

        let q = Qubit::balanced();
        let s = alice_initial_state(&q);
        assert_abs_diff_eq!(s.amplitudes[0].re, s.amplitudes[1].re);
        assert_abs_diff_eq!(s.norm_sq(), 1.0, epsilon = 1e-15);

        let q = Qubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let s = alice_initial_state(&q);
        assert_eq!(s.amplitudes[0], C64::new(0.6, 0.0));
        assert_eq!(s.amplitudes[1], C64::new(0.0, 0.8));
        assert_abs_diff_eq!(s.norm_sq(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bob_initial_state_is_ready() {
        let s = bob_initial_state();
        assert_eq!(s.amplitudes[0], C64::new(1.0, 0.0));
        assert_abs_diff_eq!(s.norm_sq(), 1.0);
        assert_eq!(s.amplitudes[2], C64::new(0.0, 0.0));
    }

    #[test]
    fn qubit_rejects_unnormalized() {
        assert!(Qubit::new(C64::new(1.0, 0.0), C64::new(0.5, 0.0)).is_err());
        assert!(Qubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).is_ok());
    }

    #[test]
    fn site_state_rejects_inflated_norm() {
        let amps = vec![C64::new(1.0, 0.0), C64::new(0.1, 0.0)];
        let mut padded = amps;
        padded.resize(ALICE_DIM, C64::new(0.0, 0.0));
        assert!(matches!(
            SiteState::new(Site::Alice, padded, 0.0),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn site_state_rejects_wrong_dimension() {
        let amps = vec![C64::new(1.0, 0.0); 3];
        assert!(SiteState::new(Site::Bob, amps, 0.0).is_err());
    }
}
