//! Channel descriptors, the (g, λ) composition form and Fock-basis
//! coefficients of the channel action.

use serde::{Deserialize, Serialize};

use crate::error::{check, Result};
use crate::numeric::{ln_fact, ln_pow, CompensatedSum};

/// Relative slack used by every entanglement-breaking style predicate so that
/// exact boundary points (e.g. λ = ν/(ν+1)) do not flip on round-off.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Attenuator,
    Amplifier,
    #[serde(rename = "additive")]
    AdditiveNoise,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Attenuator => "attenuator",
            ChannelKind::Amplifier => "amplifier",
            ChannelKind::AdditiveNoise => "additive",
        }
    }
}

/// A phase-insensitive bosonic Gaussian channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PiBGC {
    /// Thermal loss with transmissivity `lambda` and environment photons `nu`.
    Attenuator { lambda: f64, nu: f64 },
    /// Thermal amplifier with gain `g`.
    Amplifier { g: f64, nu: f64 },
    /// Additive Gaussian noise with variance `xi`.
    #[serde(rename = "additive")]
    AdditiveNoise { xi: f64 },
}

impl PiBGC {
    pub fn attenuator(lambda: f64, nu: f64) -> Result<Self> {
        let ch = PiBGC::Attenuator { lambda, nu };
        ch.validate()?;
        Ok(ch)
    }

    pub fn amplifier(g: f64, nu: f64) -> Result<Self> {
        let ch = PiBGC::Amplifier { g, nu };
        ch.validate()?;
        Ok(ch)
    }

    pub fn additive(xi: f64) -> Result<Self> {
        let ch = PiBGC::AdditiveNoise { xi };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PiBGC::Attenuator { lambda, nu } => {
                check((0.0..=1.0).contains(&lambda), "lambda", lambda, "must lie in [0, 1]")?;
                check(nu >= 0.0 && nu.is_finite(), "nu", nu, "must be finite and >= 0")
            }
            PiBGC::Amplifier { g, nu } => {
                check(g >= 1.0 && g.is_finite(), "g", g, "must be finite and >= 1")?;
                check(nu >= 0.0 && nu.is_finite(), "nu", nu, "must be finite and >= 0")
            }
            PiBGC::AdditiveNoise { xi } => {
                check(xi >= 0.0 && xi.is_finite(), "xi", xi, "must be finite and >= 0")
            }
        }
    }

    pub fn kind(&self) -> ChannelKind {
        match self {
            PiBGC::Attenuator { .. } => ChannelKind::Attenuator,
            PiBGC::Amplifier { .. } => ChannelKind::Amplifier,
            PiBGC::AdditiveNoise { .. } => ChannelKind::AdditiveNoise,
        }
    }

    pub fn to_composition(&self) -> CompositionForm {
        match *self {
            PiBGC::Attenuator { lambda, nu } => {
                let g = 1.0 + (1.0 - lambda) * nu;
                CompositionForm { g, lambda: lambda / g }
            }
            PiBGC::Amplifier { g, nu } => {
                let gp = g + (g - 1.0) * nu;
                CompositionForm { g: gp, lambda: g / gp }
            }
            PiBGC::AdditiveNoise { xi } => CompositionForm {
                g: 1.0 + xi,
                lambda: 1.0 / (1.0 + xi),
            },
        }
    }

    pub fn is_entanglement_breaking(&self) -> bool {
        self.to_composition().is_entanglement_breaking()
    }
}

/// A pure-loss channel of transmissivity `lambda` followed by a pure
/// amplifier of gain `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionForm {
    pub g: f64,
    pub lambda: f64,
}

impl CompositionForm {
    pub fn new(g: f64, lambda: f64) -> Result<Self> {
        check(g >= 1.0 && g.is_finite(), "g", g, "must be finite and >= 1")?;
        check((0.0..=1.0).contains(&lambda), "lambda", lambda, "must lie in [0, 1]")?;
        Ok(Self { g, lambda })
    }

    /// `(1-λ)g`; the channel is entanglement breaking when this reaches 1.
    pub fn eb_product(&self) -> f64 {
        (1.0 - self.lambda) * self.g
    }

    pub fn is_entanglement_breaking(&self) -> bool {
        self.eb_product() >= 1.0 - BOUNDARY_TOL
    }

    /// Coefficient `f_{n,i,l}` of `|l+n-i><l|` in the image of `|n><i|`.
    pub fn f_coeff(&self, n: usize, i: usize, l: usize) -> f64 {
        if l + n < i {
            return 0.0;
        }
        let m_lo = i.saturating_sub(l);
        let m_hi = n.min(i);
        if m_lo > m_hi {
            return 0.0;
        }
        let (g, lam) = (self.g, self.lambda);
        let h = l + n - i;
        let half = 0.5 * (ln_fact(n) + ln_fact(i) + ln_fact(l) + ln_fact(h));
        let ln_gain = ln_pow(g, l as f64 + 1.0 + 0.5 * (n as f64 - i as f64));
        let mut acc = CompensatedSum::new();
        for m in m_lo..=m_hi {
            let e = l + m - i;
            let ln_term = half
                - ln_fact(n - m)
                - ln_fact(i - m)
                - ln_fact(m)
                - ln_fact(e)
                + ln_pow(g - 1.0, e as f64)
                + ln_pow(1.0 - lam, m as f64)
                + ln_pow(lam, 0.5 * (n + i - 2 * m) as f64)
                - ln_gain;
            if ln_term > f64::NEG_INFINITY {
                acc.add(ln_term.exp());
            }
        }
        acc.value()
    }

    /// Image of `|n><i|`, truncated at `l_max`.
    pub fn channel_action_fock(&self, n: usize, i: usize, l_max: usize) -> Result<FockAction> {
        let l_min = i.saturating_sub(n);
        check(
            l_max >= l_min,
            "l_max",
            l_max as f64,
            "must be at least max(i - n, 0)",
        )?;
        let entries: Vec<FockEntry> = (l_min..=l_max)
            .map(|l| FockEntry {
                ket: l + n - i,
                bra: l,
                coeff: self.f_coeff(n, i, l),
            })
            .collect();
        let tail_mass = (n == i).then(|| {
            let s: CompensatedSum = entries.iter().map(|e| e.coeff).collect();
            1.0 - s.value()
        });
        Ok(FockAction { entries, tail_mass })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FockEntry {
    pub ket: usize,
    pub bra: usize,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockAction {
    pub entries: Vec<FockEntry>,
    /// Probability mass beyond `l_max`; only defined for diagonal inputs.
    pub tail_mass: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
    }

    #[test]
    fn composition_examples() {
        let cf = PiBGC::attenuator(0.75, 1.0).unwrap().to_composition();
        assert!((cf.g - 1.25).abs() < 1e-15 && (cf.lambda - 0.6).abs() < 1e-15);
        let cf = PiBGC::amplifier(2.0, 0.0).unwrap().to_composition();
        assert_eq!((cf.g, cf.lambda), (2.0, 1.0));
        let cf = PiBGC::additive(0.5).unwrap().to_composition();
        assert!((cf.g - 1.5).abs() < 1e-15 && (cf.lambda - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_channels_rejected() {
        assert!(PiBGC::attenuator(1.1, 0.0).is_err());
        assert!(PiBGC::attenuator(0.5, -1.0).is_err());
        assert!(PiBGC::amplifier(0.9, 0.0).is_err());
        assert!(PiBGC::additive(-0.1).is_err());
        assert!(CompositionForm::new(2.0, f64::NAN).is_err());
    }

    #[test]
    fn eb_examples() {
        assert!(!CompositionForm::new(1.25, 0.6).unwrap().is_entanglement_breaking());
        assert!(CompositionForm::new(2.0, 0.5).unwrap().is_entanglement_breaking());
        for nu in [0.1, 0.5, 1.0, 3.0, 10.0, 37.0] {
            let ch = PiBGC::attenuator(nu / (nu + 1.0), nu).unwrap();
            assert!(ch.is_entanglement_breaking(), "nu = {nu}");
        }
    }

    #[test]
    fn f_examples() {
        let cf = CompositionForm::new(2.0, 0.5).unwrap();
        assert!((cf.f_coeff(0, 0, 2) - 0.125).abs() < 1e-15);
        assert!((cf.f_coeff(1, 1, 0) - 0.25).abs() < 1e-15);
        let cf = CompositionForm::new(1.0, 0.3).unwrap();
        assert!((cf.f_coeff(2, 2, 1) - 0.42).abs() < 1e-15);
    }

    #[test]
    fn f_zero_outside_support() {
        let cf = CompositionForm::new(1.7, 0.4).unwrap();
        assert_eq!(cf.f_coeff(0, 3, 2), 0.0);
        assert!(cf.f_coeff(0, 3, 3) > 0.0);
    }

    #[test]
    fn f_special_families() {
        // f_{0,0,M} = (g-1)^M / g^{M+1}, f_{M,M,0} = (1-λ)^M / g,
        // f_{0,M,M} = f_{M,0,0} = λ^{M/2} / g^{1+M/2}
        let cf = CompositionForm::new(1.37, 0.52).unwrap();
        let (g, l) = (cf.g, cf.lambda);
        for m in 0..8usize {
            let mf = m as f64;
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
            assert!(rel(cf.f_coeff(0, 0, m), (g - 1.0).powi(m as i32) / g.powf(mf + 1.0)) < 1e-12);
            assert!(rel(cf.f_coeff(m, m, 0), (1.0 - l).powi(m as i32) / g) < 1e-12);
            let off = l.powf(mf / 2.0) / g.powf(1.0 + mf / 2.0);
            assert!(rel(cf.f_coeff(0, m, m), off) < 1e-12);
            assert!(rel(cf.f_coeff(m, 0, 0), off) < 1e-12);
        }
    }

    #[test]
    fn pure_loss_is_binomial() {
        for lam in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let cf = CompositionForm::new(1.0, lam).unwrap();
            for n in 0..8 {
                for l in 0..=n {
                    let expect = binom(n, l) * ln_pow(lam, l as f64).exp() * ln_pow(1.0 - lam, (n - l) as f64).exp();
                    assert!((cf.f_coeff(n, n, l) - expect).abs() < 1e-12);
                }
                assert_eq!(cf.f_coeff(n, n, n + 1), 0.0);
            }
        }
    }

    #[test]
    fn pure_amplifier_vacuum_is_thermal() {
        let cf = CompositionForm::new(3.0, 1.0).unwrap();
        for l in 0..10 {
            let expect = (2.0f64).powi(l) / 3f64.powi(l + 1);
            assert!((cf.f_coeff(0, 0, l as usize) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn f_is_symmetric_under_transpose() {
        let cf = CompositionForm::new(1.8, 0.35).unwrap();
        for n in 0..5 {
            for i in 0..5usize {
                for l in i.saturating_sub(n)..8 {
                    let h = l + n - i;
                    let a = cf.f_coeff(n, i, l);
                    let b = cf.f_coeff(i, n, h);
                    assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn large_indices_stay_finite() {
        let cf = CompositionForm::new(1.5, 0.7).unwrap();
        let v = cf.f_coeff(180, 175, 190);
        assert!(v.is_finite() && v >= 0.0);
    }

    #[test]
    fn fock_action_examples() {
        let cf = CompositionForm::new(2.0, 0.5).unwrap();
        let act = cf.channel_action_fock(0, 0, 3).unwrap();
        assert_eq!(act.entries.len(), 4);
        assert!((act.entries[0].coeff - 0.5).abs() < 1e-15);
        assert!((act.entries[2].coeff - 0.125).abs() < 1e-15);
        assert!((act.tail_mass.unwrap() - 0.0625).abs() < 1e-14);

        let cf = CompositionForm::new(1.0, 0.3).unwrap();
        let act = cf.channel_action_fock(1, 1, 1).unwrap();
        assert_eq!(act.entries[0].ket, 0);
        assert!((act.entries[0].coeff - 0.7).abs() < 1e-15);
        assert_eq!((act.entries[1].ket, act.entries[1].bra), (1, 1));
        assert!((act.entries[1].coeff - 0.3).abs() < 1e-15);

        assert!(cf.channel_action_fock(0, 3, 2).is_err());
        let off = cf.channel_action_fock(0, 2, 4).unwrap();
        assert_eq!(off.tail_mass, None);
        assert_eq!(off.entries[0].bra, 2);
    }
}
