//! Photon-number splitting by two Jaynes–Cummings interactions.
//!
//! Two signal modes `a1, a2` (the polarizations of the `+` basis) are coupled
//! to a three-level atom with ground state `g` and excited states `e1, e2`;
//! a second interaction couples the atom to Eve's modes `b1, b2`. With
//! coupling `λ = 1`, running the first interaction for `π/(2√n)` and the
//! second for `π/2` moves exactly one photon of an `n`-photon signal into
//! the `b` modes in the same polarization, and leaves the atom in `g`.
//!
//! Both Hamiltonians conserve the total excitation number (photons plus
//! atomic excitation), so the dynamics is computed exactly on the block of
//! fixed excitation `n`. No Fock-space truncation is involved.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{RateError, Result};

/// Largest photon number the verifier is run for.
pub const MAX_PHOTONS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Ground,
    Excited1,
    Excited2,
}

/// Occupation of `a1, a2, b1, b2` and the atomic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub a: [usize; 2],
    pub b: [usize; 2],
    pub atom: Atom,
}

impl BasisState {
    pub fn excitations(&self) -> usize {
        self.a[0] + self.a[1] + self.b[0] + self.b[1] + usize::from(self.atom != Atom::Ground)
    }
}

/// All basis states with total excitation `n`.
#[derive(Debug, Clone)]
pub struct ExcitationSubspace {
    n: usize,
    basis: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl ExcitationSubspace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_PHOTONS {
            return Err(RateError::Domain {
                name: "photon number",
                value: n as f64,
                expected: "1..=6",
            });
        }
        let mut basis = Vec::new();
        for atom in [Atom::Ground, Atom::Excited1, Atom::Excited2] {
            let photons = n - usize::from(atom != Atom::Ground);
            for a1 in 0..=photons {
                for a2 in 0..=photons - a1 {
                    for b1 in 0..=photons - a1 - a2 {
                        let b2 = photons - a1 - a2 - b1;
                        basis.push(BasisState { a: [a1, a2], b: [b1, b2], atom });
                    }
                }
            }
        }
        let index = basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(Self { n, basis, index })
    }

    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Hermitian operator on one excitation block.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Largest entry of `H - H†`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Index sets of the connected components of the coupling graph of `H`.
    /// `H` is block diagonal over them.
    pub fn invariant_blocks(&self) -> Vec<Vec<usize>> {
        let dim = self.matrix.nrows();
        let mut seen = vec![false; dim];
        let mut blocks = Vec::new();
        for start in 0..dim {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut block = vec![start];
            let mut next = 0;
            while next < block.len() {
                let i = block[next];
                next += 1;
                for j in 0..dim {
                    if !seen[j] && self.matrix[(i, j)] != Complex64::new(0.0, 0.0) {
                        seen[j] = true;
                        block.push(j);
                    }
                }
            }
            block.sort_unstable();
            blocks.push(block);
        }
        blocks
    }

    /// `exp(-i H t)`, from a Hermitian eigendecomposition of each invariant
    /// block.
    pub fn propagator(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let dim = self.matrix.nrows();
        let mut u = DMatrix::<Complex64>::zeros(dim, dim);
        for block in self.invariant_blocks() {
            let k = block.len();
            let sub = DMatrix::from_fn(k, k, |r, c| self.matrix[(block[r], block[c])]);
            let eig = SymmetricEigen::try_new(sub, 1e-15, 10_000)
                .ok_or_else(|| RateError::Numeric(format!("eigendecomposition of {k}x{k} block failed")))?;
            let phases = DVector::from_iterator(
                k,
                eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * t)),
            );
            let v = &eig.eigenvectors;
            let exp_block = v * DMatrix::from_diagonal(&phases) * v.adjoint();
            for (r, &i) in block.iter().enumerate() {
                for (c, &j) in block.iter().enumerate() {
                    u[(i, j)] = exp_block[(r, c)];
                }
            }
        }
        Ok(u)
    }
}

/// Which photon modes the Hamiltonian couples to the atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coupled {
    Signal,
    Eve,
}

fn jaynes_cummings(sub: &ExcitationSubspace, modes: Coupled) -> FockOperator {
    let dim = sub.dim();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, state) in sub.basis.iter().enumerate() {
        let i = match state.atom {
            Atom::Ground => continue,
            Atom::Excited1 => 0,
            Atom::Excited2 => 1,
        };
        // a_i† σ_i: atom e_i -> g, one photon added to mode i
        let mut target = BasisState { atom: Atom::Ground, ..*state };
        let k = match modes {
            Coupled::Signal => {
                target.a[i] += 1;
                state.a[i]
            }
            Coupled::Eve => {
                target.b[i] += 1;
                state.b[i]
            }
        };
        let row = sub.index[&target];
        let amp = Complex64::new(((k + 1) as f64).sqrt(), 0.0);
        h[(row, col)] = amp;
        h[(col, row)] = amp;
    }
    FockOperator { matrix: h }
}

/// Interaction of the atom with the signal modes (`H1`) and with Eve's
/// modes (`H2`), both with `λ = 1`.
pub fn build_hamiltonians(sub: &ExcitationSubspace) -> (FockOperator, FockOperator) {
    (jaynes_cummings(sub, Coupled::Signal), jaynes_cummings(sub, Coupled::Eve))
}

/// Amplitudes over the basis of an excitation block.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `|<self|other>|²`, insensitive to global phase.
    pub fn overlap_sq(&self, other: &StateVector) -> f64 {
        self.amps.dotc(&other.amps).norm_sqr()
    }

    fn expectation<F: Fn(&BasisState) -> f64>(&self, sub: &ExcitationSubspace, f: F) -> f64 {
        sub.basis.iter().zip(self.amps.iter()).map(|(s, a)| f(s) * a.norm_sqr()).sum()
    }

    pub fn ground_population(&self, sub: &ExcitationSubspace) -> f64 {
        self.expectation(sub, |s| if s.atom == Atom::Ground { 1.0 } else { 0.0 })
    }

    pub fn signal_photons(&self, sub: &ExcitationSubspace) -> f64 {
        self.expectation(sub, |s| (s.a[0] + s.a[1]) as f64)
    }

    pub fn eve_photons(&self, sub: &ExcitationSubspace) -> f64 {
        self.expectation(sub, |s| (s.b[0] + s.b[1]) as f64)
    }
}

/// `exp(-i H t) |state>`.
pub fn evolve(state: &StateVector, h: &FockOperator, t: f64) -> Result<StateVector> {
    if h.matrix.nrows() != state.amps.len() {
        return Err(RateError::Numeric("state and operator live on different blocks".into()));
    }
    Ok(StateVector { amps: h.propagator(t)? * &state.amps })
}

/// A definite polarization `c1 a1† + c2 a2†` of the signal photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Polarization {
    A1,
    A2,
    /// `(a1 + a2)/√2`.
    Plus,
    /// `(a1 - a2)/√2`.
    Minus,
    /// `cos θ a1 + e^{iφ} sin θ a2`.
    Elliptic { theta: f64, phi: f64 },
}

impl Polarization {
    /// The four BB84 signal polarizations.
    pub const BB84: [Polarization; 4] =
        [Polarization::A1, Polarization::A2, Polarization::Plus, Polarization::Minus];

    pub fn amplitudes(&self) -> [Complex64; 2] {
        let r = |x: f64| Complex64::new(x, 0.0);
        match *self {
            Polarization::A1 => [r(1.0), r(0.0)],
            Polarization::A2 => [r(0.0), r(1.0)],
            Polarization::Plus => [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
            Polarization::Minus => [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)],
            Polarization::Elliptic { theta, phi } => {
                [r(theta.cos()), Complex64::from_polar(theta.sin(), phi)]
            }
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::A1 => write!(f, "a1"),
            Polarization::A2 => write!(f, "a2"),
            Polarization::Plus => write!(f, "a+"),
            Polarization::Minus => write!(f, "a-"),
            Polarization::Elliptic { theta, phi } => write!(f, "theta={theta:.4},phi={phi:.4}"),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(c1 a1† + c2 a2†)^m / √m! |0>` on the signal modes, optionally with one
/// photon `(c1 b1† + c2 b2†)` in Eve's modes; atom in `g`.
fn product_state(sub: &ExcitationSubspace, pol: [Complex64; 2], signal: usize, eve: bool) -> StateVector {
    let mut amps = DVector::<Complex64>::zeros(sub.dim());
    let eve_terms: Vec<([usize; 2], Complex64)> = if eve {
        vec![([1, 0], pol[0]), ([0, 1], pol[1])]
    } else {
        vec![([0, 0], Complex64::new(1.0, 0.0))]
    };
    for k in 0..=signal {
        let a_amp = pol[0].powu(k as u32) * pol[1].powu((signal - k) as u32) * binomial(signal, k).sqrt();
        for &(b, b_amp) in &eve_terms {
            let state = BasisState { a: [k, signal - k], b, atom: Atom::Ground };
            let i = sub.index[&state];
            amps[i] += a_amp * b_amp;
        }
    }
    StateVector { amps }
}

/// `n` photons in the given polarization, Eve's modes empty, atom in `g`.
pub fn signal_state(sub: &ExcitationSubspace, pol: Polarization) -> StateVector {
    product_state(sub, pol.amplitudes(), sub.n, false)
}

/// Intended outcome: `n - 1` photons left in the signal modes and one in
/// Eve's modes, both in the original polarization, atom in `g`.
pub fn split_state(sub: &ExcitationSubspace, pol: Polarization) -> StateVector {
    product_state(sub, pol.amplitudes(), sub.n - 1, true)
}

/// Interaction times `(π/(2√n), π/2)` in units of `1/λ`.
pub fn interaction_times(n: usize) -> (f64, f64) {
    (FRAC_PI_2 / (n as f64).sqrt(), FRAC_PI_2)
}

/// The full splitting unitary on the `n`-excitation block.
pub fn splitting_unitary(sub: &ExcitationSubspace) -> Result<DMatrix<Complex64>> {
    let (h1, h2) = build_hamiltonians(sub);
    let (t1, t2) = interaction_times(sub.n);
    Ok(h2.propagator(t2)? * h1.propagator(t1)?)
}

/// `max |U†U - I|`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let eye = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    max_abs(&(u.adjoint() * u - eye))
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct PnsOutcome {
    pub output: StateVector,
    /// `|<target|output>|²`.
    pub fidelity: f64,
}

/// Runs both interactions on `n` photons of polarization `pol` and compares
/// with the intended split state.
pub fn pns_transform(n: usize, pol: Polarization) -> Result<PnsOutcome> {
    let sub = ExcitationSubspace::new(n)?;
    let (h1, h2) = build_hamiltonians(&sub);
    let (t1, t2) = interaction_times(n);
    let excited = evolve(&signal_state(&sub, pol), &h1, t1)?;
    let output = evolve(&excited, &h2, t2)?;
    let fidelity = output.overlap_sq(&split_state(&sub, pol)).clamp(0.0, 1.0);
    Ok(PnsOutcome { output, fidelity })
}

/// One row of the verification table.
#[derive(Debug, Clone, PartialEq)]
pub struct PnsCheck {
    pub n: usize,
    pub polarization: Polarization,
    pub fidelity: f64,
    pub ground_population: f64,
    pub signal_photons: f64,
    pub eve_photons: f64,
    pub unitarity_defect: f64,
}

pub const FIDELITY_TOL: f64 = 1e-9;
pub const UNITARITY_TOL: f64 = 1e-10;

impl PnsCheck {
    pub fn passed(&self) -> bool {
        self.fidelity >= 1.0 - FIDELITY_TOL
            && self.ground_population >= 1.0 - FIDELITY_TOL
            && (self.eve_photons - 1.0).abs() <= FIDELITY_TOL
            && (self.signal_photons - (self.n as f64 - 1.0)).abs() <= FIDELITY_TOL
            && self.unitarity_defect < UNITARITY_TOL
    }
}

/// Checks the splitting for every `n` in `1..=n_max` and every polarization.
pub fn verify(n_max: usize, polarizations: &[Polarization]) -> Result<Vec<PnsCheck>> {
    if n_max == 0 || n_max > MAX_PHOTONS {
        return Err(RateError::Domain { name: "n_max", value: n_max as f64, expected: "1..=6" });
    }
    let mut rows = Vec::with_capacity(n_max * polarizations.len());
    for n in 1..=n_max {
        let sub = ExcitationSubspace::new(n)?;
        let u = splitting_unitary(&sub)?;
        let defect = unitarity_defect(&u);
        for &pol in polarizations {
            let output = StateVector { amps: &u * signal_state(&sub, pol).amps };
            rows.push(PnsCheck {
                n,
                polarization: pol,
                fidelity: output.overlap_sq(&split_state(&sub, pol)).clamp(0.0, 1.0),
                ground_population: output.ground_population(&sub),
                signal_photons: output.signal_photons(&sub),
                eve_photons: output.eve_photons(&sub),
                unitarity_defect: defect,
            });
        }
    }
    Ok(rows)
}
