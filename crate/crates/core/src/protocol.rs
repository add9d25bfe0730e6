//! Measurements, Kraus channel and success probabilities of the
//! entanglement-assisted sequential 2→1 random access code.
//!
//! Alice holds one half of `(|00⟩ + |11⟩)/√2` and measures along X (`x = 0`)
//! or Z (`x = 1`) where `x = x₀ ⊕ x₁`, then broadcasts `m₁ = x₀ ⊕ a`. Bob
//! measures unsharply along `cos α σ₁ + (−1)^y sin α σ₃` with sharpness `η_y`
//! and guesses `x_y = m₁ ⊕ b`. Charlie receives Bob's post-measurement qubit
//! averaged over Bob's input and outcome, measures sharply along
//! `cos β σ₁ + (−1)^z sin β σ₃` and guesses `x_z = m₁ ⊕ c`.
//!
//! Every probability is available twice: a brute-force enumeration of Born
//! probabilities over all inputs and outcomes, and a closed form. The
//! enumerations are the reference; the closed forms are what the optimizer
//! and scans use.

use std::f64::consts::FRAC_PI_4;
use std::ops::BitXor;

use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::qcore::{
    max_entangled_state, pauli_expand, BlochVector, Mat2, TwoQubitState,
};

/// Largest wave-plate angle, where the measurement carries no information.
pub const THETA_LAMBDA_MAX: f64 = std::f64::consts::PI / 8.0;

/// Classical bound shared by both decoders.
pub const CLASSICAL_BOUND: f64 = 0.75;

const UNIT_TOL: f64 = 1e-12;

/// A classical bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const BOTH: [Bit; 2] = [Bit::Zero, Bit::One];

    /// `(−1)^bit`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Bit::Zero => 1.0,
            Bit::One => -1.0,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn flip(self) -> Bit {
        self ^ Bit::One
    }

    pub fn from_index(i: usize) -> Bit {
        if i % 2 == 0 {
            Bit::Zero
        } else {
            Bit::One
        }
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit::from_index(self.index() ^ rhs.index())
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Bit {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

/// Sharpness from the wave-plate angle, `η = cos 4θ_λ`.
pub fn sharpness_from_theta(theta_lambda: f64) -> f64 {
    (4.0 * theta_lambda).cos()
}

/// Inverse of [`sharpness_from_theta`] on `θ_λ ∈ [0, π/8]`.
pub fn theta_from_sharpness(eta: f64) -> f64 {
    eta.clamp(-1.0, 1.0).acos() / 4.0
}

/// A dichotomic qubit measurement: unit Bloch direction and sharpness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitObservable {
    direction: BlochVector,
    sharpness: f64,
}

impl QubitObservable {
    pub fn new(direction: BlochVector, sharpness: f64) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain {
                what: "direction norm",
                value: direction.norm(),
                range: "{1}",
            });
        }
        check_range("sharpness", sharpness, 0.0, 1.0, "[0, 1]")?;
        Ok(Self {
            direction,
            sharpness,
        })
    }

    pub fn sharp(direction: BlochVector) -> Result<Self> {
        Self::new(direction, 1.0)
    }

    pub fn direction(&self) -> BlochVector {
        self.direction
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// `M_b = [I + (−1)^b η n·σ]/2`.
    pub fn effect(&self, outcome: Bit) -> Mat2 {
        pauli_expand(self.direction.scale(outcome.sign() * self.sharpness))
    }

    /// Observable `M_0 − M_1 = η n·σ`.
    pub fn observable(&self) -> Mat2 {
        self.direction.scale(self.sharpness).sigma_dot()
    }

    /// Kraus pair realising this measurement with `θ_λ = arccos(η)/4`.
    pub fn kraus_pair(&self) -> KrausPair {
        KrausPair::from_angle(self.direction, theta_from_sharpness(self.sharpness))
    }
}

/// The two Kraus operators of an unsharp measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausPair {
    pub k0: Mat2,
    pub k1: Mat2,
}

impl KrausPair {
    /// `K₀ = cos2θ |φ⟩⟨φ| + sin2θ |φ⊥⟩⟨φ⊥|` and `K₁` with the two
    /// coefficients swapped, where `|φ⟩` is the `+direction` eigenstate.
    pub fn from_angle(direction: BlochVector, theta_lambda: f64) -> Self {
        let plus = pauli_expand(direction);
        let minus = pauli_expand(-direction);
        let (c, s) = ((2.0 * theta_lambda).cos(), (2.0 * theta_lambda).sin());
        Self {
            k0: plus.scale_real(c) + minus.scale_real(s),
            k1: plus.scale_real(s) + minus.scale_real(c),
        }
    }

    pub fn get(&self, outcome: Bit) -> &Mat2 {
        match outcome {
            Bit::Zero => &self.k0,
            Bit::One => &self.k1,
        }
    }

    /// `K₀†K₀ + K₁†K₁`, which must be the identity.
    pub fn completeness(&self) -> Mat2 {
        self.k0.adjoint() * self.k0 + self.k1.adjoint() * self.k1
    }
}

/// Bob's two sharpnesses and both decoders' measurement angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub eta0: f64,
    pub eta1: f64,
    /// Bob's direction angle in radians.
    pub alpha: f64,
    /// Charlie's direction angle in radians.
    pub beta: f64,
}

impl ProtocolParams {
    pub fn new(eta0: f64, eta1: f64, alpha: f64, beta: f64) -> Result<Self> {
        check_range("eta0", eta0, 0.0, 1.0, "[0, 1]")?;
        check_range("eta1", eta1, 0.0, 1.0, "[0, 1]")?;
        check_range("alpha", alpha, 0.0, FRAC_PI_4 + 1e-12, "[0, π/4]")?;
        check_range("beta", beta, 0.0, FRAC_PI_4 + 1e-12, "[0, π/4]")?;
        Ok(Self {
            eta0,
            eta1,
            alpha: alpha.min(FRAC_PI_4),
            beta: beta.min(FRAC_PI_4),
        })
    }

    /// Mutually unbiased directions for both decoders, `α = β = π/4`.
    pub fn unbiased(eta0: f64, eta1: f64) -> Result<Self> {
        Self::new(eta0, eta1, FRAC_PI_4, FRAC_PI_4)
    }

    pub fn eta(&self, y: Bit) -> f64 {
        match y {
            Bit::Zero => self.eta0,
            Bit::One => self.eta1,
        }
    }

    pub fn theta_lambda(&self, y: Bit) -> f64 {
        theta_from_sharpness(self.eta(y))
    }

    /// `√(1−η₀²) + √(1−η₁²)`, the total residual coherence left by Bob.
    pub fn residual(&self) -> f64 {
        residual(self.eta0, self.eta1)
    }
}

pub(crate) fn residual(eta0: f64, eta1: f64) -> f64 {
    (1.0 - eta0 * eta0).max(0.0).sqrt() + (1.0 - eta1 * eta1).max(0.0).sqrt()
}

/// Which measurement strategy produced a parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Unbiased,
    Optimized,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Unbiased => "unbiased",
            Branch::Optimized => "optimized",
        }
    }
}

/// The three success probabilities at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuccessReport {
    pub p_ab: f64,
    pub p_ac: f64,
    pub p_abc: f64,
    pub branch: Branch,
}

impl SuccessReport {
    pub fn evaluate(params: &ProtocolParams, branch: Branch) -> Self {
        Self {
            p_ab: p_ab_closed(params),
            p_ac: p_ac_closed(params),
            p_abc: p_abc(params),
            branch,
        }
    }

    pub fn min_decoder(&self) -> f64 {
        self.p_ab.min(self.p_ac)
    }

    pub fn double_violation(&self) -> bool {
        self.min_decoder() >= CLASSICAL_BOUND - 1e-12
    }
}

pub fn alice_direction(x: Bit) -> BlochVector {
    match x {
        Bit::Zero => BlochVector::new(1.0, 0.0, 0.0),
        Bit::One => BlochVector::new(0.0, 0.0, 1.0),
    }
}

pub fn bob_direction(y: Bit, alpha: f64) -> BlochVector {
    BlochVector::new(alpha.cos(), 0.0, y.sign() * alpha.sin())
}

pub fn charlie_direction(z: Bit, beta: f64) -> BlochVector {
    BlochVector::new(beta.cos(), 0.0, z.sign() * beta.sin())
}

/// `M_{a|r_x} = [I + (−1)^a ((x⊕1)σ₁ + xσ₃)]/2`.
pub fn alice_povm(x: Bit, a: Bit) -> Mat2 {
    pauli_expand(alice_direction(x).scale(a.sign()))
}

/// Bloch vector of Alice's encoding state `p_{a|r_x}`.
pub fn encoding_vector(x: Bit, a: Bit) -> BlochVector {
    alice_direction(x).scale(a.sign())
}

pub fn bob_observable(y: Bit, params: &ProtocolParams) -> QubitObservable {
    QubitObservable {
        direction: bob_direction(y, params.alpha),
        sharpness: params.eta(y),
    }
}

/// `M_{b|s_y}` with sharpness `η_y`.
pub fn bob_povm(y: Bit, b: Bit, params: &ProtocolParams) -> Mat2 {
    bob_observable(y, params).effect(b)
}

/// Kraus operator `K_{b|s_y}` for wave-plate angle `θ_λ ∈ [0, π/8]`, giving
/// sharpness `cos 4θ_λ`.
pub fn bob_kraus(y: Bit, b: Bit, alpha: f64, theta_lambda: f64) -> Result<Mat2> {
    if !(-1e-15..=THETA_LAMBDA_MAX + 1e-15).contains(&theta_lambda) {
        return Err(Error::Domain {
            what: "theta_lambda",
            value: theta_lambda,
            range: "[0, π/8]",
        });
    }
    let pair = KrausPair::from_angle(bob_direction(y, alpha), theta_lambda);
    Ok(*pair.get(b))
}

pub fn bob_kraus_pair(y: Bit, params: &ProtocolParams) -> KrausPair {
    KrausPair::from_angle(bob_direction(y, params.alpha), params.theta_lambda(y))
}

/// `M_{c|t_z} = [I + (−1)^c (cos β σ₁ + (−1)^z sin β σ₃)]/2`.
pub fn charlie_povm(z: Bit, c: Bit, beta: f64) -> Mat2 {
    pauli_expand(charlie_direction(z, beta).scale(c.sign()))
}

/// State shared by Alice and Charlie: Bob's Kraus channel averaged over his
/// input `y` and summed over his outcome `b`.
pub fn rho_ac(rho_ab: &TwoQubitState, params: &ProtocolParams) -> TwoQubitState {
    let mut kraus = Vec::with_capacity(4);
    for y in Bit::BOTH {
        let pair = bob_kraus_pair(y, params);
        let w = std::f64::consts::FRAC_1_SQRT_2;
        kraus.push(pair.k0.scale_real(w));
        kraus.push(pair.k1.scale_real(w));
    }
    TwoQubitState::from_trusted(rho_ab.apply_second(&kraus))
}

/// All eight equiprobable inputs `(x₀, x₁, d)` where `d` is the decoder's
/// choice of bit to recover.
fn inputs() -> impl Iterator<Item = (Bit, Bit, Bit)> {
    Bit::BOTH.into_iter().flat_map(|x0| {
        Bit::BOTH
            .into_iter()
            .flat_map(move |x1| Bit::BOTH.into_iter().map(move |d| (x0, x1, d)))
    })
}

/// The decoding rule shared by both decoders: guess `m₁ ⊕ outcome` with
/// `m₁ = x₀ ⊕ a`.
#[inline]
pub fn decodes(x0: Bit, x1: Bit, choice: Bit, a: Bit, outcome: Bit) -> bool {
    let target = if choice == Bit::Zero { x0 } else { x1 };
    target == (x0 ^ a) ^ outcome
}

/// `P(x_y = m₁ ⊕ b | x₀, x₁, y)` for the state `rho`, where Bob's effect for
/// input `y` and outcome `b` is `effect(y, b)`.
fn decode_probability(
    rho: &TwoQubitState,
    x0: Bit,
    x1: Bit,
    choice: Bit,
    effect: impl Fn(Bit, Bit) -> Mat2,
) -> f64 {
    let x = x0 ^ x1;
    let mut p = 0.0;
    for a in Bit::BOTH {
        for out in Bit::BOTH {
            if decodes(x0, x1, choice, a, out) {
                p += rho.local_expectation(&alice_povm(x, a), &effect(choice, out));
            }
        }
    }
    p
}

/// Bob's average success probability by enumerating every input and outcome.
pub fn p_ab_bruteforce(params: &ProtocolParams) -> f64 {
    let rho = max_entangled_state();
    let effect = |y: Bit, b: Bit| {
        let k = *bob_kraus_pair(y, params).get(b);
        k.adjoint() * k
    };
    inputs()
        .map(|(x0, x1, y)| decode_probability(&rho, x0, x1, y, effect))
        .sum::<f64>()
        / 8.0
}

/// `P_AB = [4 + (η₀+η₁)(cos α + sin α)]/8`.
pub fn p_ab_closed(params: &ProtocolParams) -> f64 {
    p_ab_at(params.eta0, params.eta1, params.alpha)
}

pub(crate) fn p_ab_at(eta0: f64, eta1: f64, alpha: f64) -> f64 {
    (4.0 + (eta0 + eta1) * (alpha.cos() + alpha.sin())) / 8.0
}

/// Charlie's average success probability by enumeration on `ρ_AC`.
pub fn p_ac_bruteforce(params: &ProtocolParams) -> f64 {
    let rho = rho_ac(&max_entangled_state(), params);
    let effect = |z: Bit, c: Bit| charlie_povm(z, c, params.beta);
    inputs()
        .map(|(x0, x1, z)| decode_probability(&rho, x0, x1, z, effect))
        .sum::<f64>()
        / 8.0
}

/// `P_AC = [4 + 2M + N(√(1−η₀²) + √(1−η₁²))]/8` with
/// `M = cos²α cos β + sin²α sin β`, `N = cos²α sin β + sin²α cos β`.
pub fn p_ac_closed(params: &ProtocolParams) -> f64 {
    p_ac_at(params.alpha, params.beta, params.residual())
}

pub(crate) fn p_ac_at(alpha: f64, beta: f64, residual: f64) -> f64 {
    let (m, n) = charlie_weights(alpha, beta);
    (4.0 + 2.0 * m + n * residual) / 8.0
}

/// The `(M, N)` pair entering Charlie's success probability.
pub fn charlie_weights(alpha: f64, beta: f64) -> (f64, f64) {
    let (c2, s2) = (alpha.cos().powi(2), alpha.sin().powi(2));
    let (cb, sb) = (beta.cos(), beta.sin());
    (c2 * cb + s2 * sb, c2 * sb + s2 * cb)
}

/// Probability that Bob and Charlie both decode correctly when they always
/// target different bits (`z = 1 − y`), by enumeration of the sequential
/// process `Tr[(M_a ⊗ K_b† M_c K_b) ρ_AB]`.
pub fn p_abc_bruteforce(params: &ProtocolParams) -> f64 {
    let rho = max_entangled_state();
    let mut total = 0.0;
    for (x0, x1, y) in inputs() {
        let z = y.flip();
        let x = x0 ^ x1;
        let pair = bob_kraus_pair(y, params);
        for a in Bit::BOTH {
            for b in Bit::BOTH {
                if !decodes(x0, x1, y, a, b) {
                    continue;
                }
                let k = pair.get(b);
                for c in Bit::BOTH {
                    if decodes(x0, x1, z, a, c) {
                        let effect = k.adjoint() * charlie_povm(z, c, params.beta) * *k;
                        total += rho.local_expectation(&alice_povm(x, a), &effect);
                    }
                }
            }
        }
    }
    total / 8.0
}

/// Closed form of the joint decoding probability:
/// `1/4 + cos(α+β)(cos α − sin α)/8 + (η₀+η₁)(cos α + sin α)/16
///  + (√(1−η₀²)+√(1−η₁²))(cos α + sin α) sin(α+β)/16`.
pub fn p_abc(params: &ProtocolParams) -> f64 {
    let ProtocolParams {
        eta0,
        eta1,
        alpha,
        beta,
    } = *params;
    let (ca, sa) = (alpha.cos(), alpha.sin());
    0.25 + (alpha + beta).cos() / 8.0 * (ca - sa)
        + (eta0 + eta1) / 16.0 * (ca + sa)
        + params.residual() / 16.0 * (ca + sa) * (alpha + beta).sin()
}

/// Charlie's conditional Bloch vectors `m_{a|r_x}`, indexed `[x][a]`,
/// obtained by steering `ρ_AC` with Alice's projectors.
pub fn charlie_conditional_vectors(params: &ProtocolParams) -> [[BlochVector; 2]; 2] {
    let rho = rho_ac(&max_entangled_state(), params);
    let mut out = [[BlochVector::default(); 2]; 2];
    for x in Bit::BOTH {
        for a in Bit::BOTH {
            let cond = rho.conditional_second(&alice_povm(x, a));
            let p = cond.trace().re;
            out[x.index()][a.index()] = BlochVector::from_density(&cond.scale_real(1.0 / p));
        }
    }
    out
}

/// Closed form of [`charlie_conditional_vectors`]:
/// `m_{a|r₀} = (−1)^a (G₀, 0, F sin 2α)` and `m_{a|r₁} = (−1)^a (F sin 2α, 0, G₁)`
/// with `F = (√(1−η₁²) − √(1−η₀²))/4` and
/// `G₀,₁ = [2 + k₀ + k₁ ± (2 − k₀ − k₁) cos 2α]/4`, `k_y = √(1−η_y²)`.
pub fn charlie_conditional_vectors_closed(params: &ProtocolParams) -> [[BlochVector; 2]; 2] {
    let k0 = (1.0 - params.eta0.powi(2)).max(0.0).sqrt();
    let k1 = (1.0 - params.eta1.powi(2)).max(0.0).sqrt();
    let f = (k1 - k0) / 4.0 * (2.0 * params.alpha).sin();
    let c2a = (2.0 * params.alpha).cos();
    let g0 = (2.0 + k0 + k1 + (2.0 - k0 - k1) * c2a) / 4.0;
    let g1 = (2.0 + k0 + k1 - (2.0 - k0 - k1) * c2a) / 4.0;
    let m0 = BlochVector::new(g0, 0.0, f);
    let m1 = BlochVector::new(f, 0.0, g1);
    [[m0, -m0], [m1, -m1]]
}
