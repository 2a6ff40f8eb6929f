use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{Budget, Capped};
use crate::core::{for_each_point, Assignment, BoolFunc};
use crate::error::{Error, Result};
use crate::genct::{make_forward_tools, BottomSampler, ForwardTools};

/// Density of `h` inside `g` and an estimate of `|g⁻¹(1)|`, with the raw counts behind them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckCertificate {
    pub alpha: f64,
    pub kappa: f64,
    pub samples: u64,
    pub hits: u64,
    /// Counter output for `g` as a fraction of the cube.
    pub g_fraction: f64,
    pub declared_samples: f64,
}

/// Certifies a candidate: `α` is the fraction of generator draws from `g`
/// accepted by `h`, `κ = 2ⁿ·counter(g)`. Any ⊥ from the generator fails the check.
#[allow(clippy::too_many_arguments)]
pub fn check(
    g: &BoolFunc,
    h: &BoolFunc,
    delta_prime: f64,
    epsilon: f64,
    gamma: f64,
    tools: &ForwardTools,
    budget: &Budget,
    rng: &mut dyn RngCore,
) -> Result<CheckCertificate> {
    if !(delta_prime > 0.0 && delta_prime < 1.0) || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("check needs epsilon and delta in (0,1)"));
    }
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: h.dim() });
    }
    let mu = epsilon / 40000.0;
    let m = Capped::new((2.0 / (gamma * mu * mu)) * (2.0 / delta_prime).ln(), budget.check_samples);
    let generator = tools.sampler(delta_prime / (2.0 * m.used as f64))?;
    let mut hits = 0u64;
    for _ in 0..m.used {
        let x = generator
            .generate(rng)
            .ok_or_else(|| Error::CheckFailure("the generator for g returned ⊥".into()))?;
        hits += h.eval_unchecked(&x) as u64;
    }
    let g_fraction = tools.count(mu, delta_prime / 2.0, rng)?.value;
    Ok(CheckCertificate {
        alpha: hits as f64 / m.used as f64,
        kappa: 2f64.powi(g.dim() as i32) * g_fraction,
        samples: m.used,
        hits,
        g_fraction,
        declared_samples: m.declared,
    })
}

/// Deterministic approximate probability of `x` under the candidate's output:
/// 0 outside `g ∧ h`, `1/(κα)` inside.
pub fn simulate_approx_eval(x: &Assignment, cert: &CheckCertificate, g: &BoolFunc, h: &BoolFunc) -> Result<f64> {
    if !g.eval_unchecked(x) || !h.eval_unchecked(x) {
        return Ok(0.0);
    }
    if cert.alpha <= 0.0 || cert.kappa <= 0.0 {
        return Err(Error::DegenerateCertificate { alpha: cert.alpha, kappa: cert.kappa });
    }
    Ok(1.0 / (cert.kappa * cert.alpha))
}

/// Serializable description of an [`InverseSampler`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub g: BoolFunc,
    pub h: BoolFunc,
    pub trials: u64,
    pub generator_delta: f64,
    pub certificate: Option<CheckCertificate>,
}

/// Rejection sampler: draws from the uniform generator for `g` and returns
/// the first draw accepted by `h`, or ⊥ after `trials` attempts.
#[derive(Clone)]
pub struct InverseSampler {
    g: BoolFunc,
    h: BoolFunc,
    generator: Arc<dyn BottomSampler>,
    trials: u64,
    generator_delta: f64,
    certificate: Option<CheckCertificate>,
}

impl std::fmt::Debug for InverseSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InverseSampler")
            .field("g", &self.g)
            .field("h", &self.h)
            .field("trials", &self.trials)
            .field("certificate", &self.certificate)
            .finish()
    }
}

impl InverseSampler {
    pub fn new(g: BoolFunc, h: BoolFunc, generator: Arc<dyn BottomSampler>, trials: u64, generator_delta: f64) -> Self {
        InverseSampler { g, h, generator, trials: trials.max(1), generator_delta, certificate: None }
    }

    /// Rebuilds a sampler, including its generator, from a saved description.
    pub fn from_spec(spec: &SamplerSpec) -> Result<Self> {
        if spec.g.dim() != spec.h.dim() {
            return Err(Error::DimensionMismatch { expected: spec.g.dim(), got: spec.h.dim() });
        }
        let generator = make_forward_tools(&spec.g)?.sampler(spec.generator_delta)?;
        let mut s = InverseSampler::new(spec.g.clone(), spec.h.clone(), generator, spec.trials, spec.generator_delta);
        s.certificate = spec.certificate;
        Ok(s)
    }

    pub fn to_spec(&self) -> SamplerSpec {
        SamplerSpec {
            g: self.g.clone(),
            h: self.h.clone(),
            trials: self.trials,
            generator_delta: self.generator_delta,
            certificate: self.certificate,
        }
    }

    pub fn with_certificate(mut self, cert: CheckCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn g(&self) -> &BoolFunc {
        &self.g
    }

    pub fn h(&self) -> &BoolFunc {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn certificate(&self) -> Option<&CheckCertificate> {
        self.certificate.as_ref()
    }

    pub fn accepts(&self, x: &Assignment) -> bool {
        self.g.eval_unchecked(x) && self.h.eval_unchecked(x)
    }

    /// The approximate probability oracle built from the certificate.
    pub fn approx_eval(&self, x: &Assignment) -> Result<f64> {
        let cert = self.certificate.as_ref().ok_or_else(|| Error::invalid("sampler has no certificate"))?;
        simulate_approx_eval(x, cert, &self.g, &self.h)
    }

    /// Support of the output given non-⊥, by enumeration. The generators are
    /// exactly uniform, so the conditional output is uniform on this set.
    pub fn conditional_support(&self) -> Result<Vec<Assignment>> {
        let n = self.dim();
        if n > crate::core::ENUMERATION_CAP {
            return Err(Error::Capacity(format!("cannot enumerate dimension {n}")));
        }
        let mut out = Vec::new();
        for_each_point(n, |x| {
            if self.accepts(&x) {
                out.push(x);
            }
        })?;
        Ok(out)
    }
}

impl BottomSampler for InverseSampler {
    fn generate(&self, rng: &mut dyn RngCore) -> Option<Assignment> {
        (0..self.trials).find_map(|_| self.generator.generate(rng).filter(|x| self.accepts(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{brute_force_satisfying_set, Conjunction, Dnf, FeatureDisjunction, Literal, Ltf};
    use crate::seed::SeedTree;

    fn small_pair() -> (BoolFunc, BoolFunc) {
        let g = BoolFunc::Ltf(Ltf::new(vec![1, 1, 1, 1, 1], -1).unwrap());
        let h = BoolFunc::Dnf(
            Dnf::new(
                5,
                vec![
                    Conjunction::new(&[Literal::pos(1)]).unwrap(),
                    Conjunction::new(&[Literal::pos(2), Literal::neg(3)]).unwrap(),
                ],
            )
            .unwrap(),
        );
        (g, h)
    }

    #[test]
    fn constant_true_h_is_exact() {
        let (g, _) = small_pair();
        let tools = make_forward_tools(&g).unwrap();
        let h = BoolFunc::ConstTrue { n: 5 };
        let cert = check(&g, &h, 0.1, 0.4, 0.5, &tools, &Budget::default(), &mut SeedTree::new(1).rng()).unwrap();
        assert_eq!(cert.alpha, 1.0);
        assert_eq!(cert.kappa, brute_force_satisfying_set(&g, 5).unwrap().len() as f64);
    }

    #[test]
    fn alpha_concentrates() {
        let (g, h) = small_pair();
        let gs = brute_force_satisfying_set(&g, 5).unwrap();
        let density = gs.iter().filter(|x| h.eval_unchecked(x)).count() as f64 / gs.len() as f64;
        let tools = make_forward_tools(&g).unwrap();
        let budget = Budget { check_samples: 20_000, ..Budget::default() };
        let mut rng = SeedTree::new(2).rng();
        let mut ok = 0;
        let trials = 200;
        for _ in 0..trials {
            let cert = check(&g, &h, 0.1, 0.4, 0.5, &tools, &budget, &mut rng).unwrap();
            assert_eq!(cert.samples, 20_000);
            assert_eq!(cert.alpha, cert.hits as f64 / cert.samples as f64);
            // Hoeffding radius at 20k draws and confidence 0.1.
            ok += ((cert.alpha - density).abs() <= (20f64.ln() / 40_000.0).sqrt()) as u32;
        }
        assert!(ok as f64 >= trials as f64 * (1.0 - 0.1 - 0.02));
    }

    #[test]
    fn approx_eval_branches_and_normalization() {
        let (g, h) = small_pair();
        let tools = make_forward_tools(&g).unwrap();
        let support: Vec<Assignment> =
            brute_force_satisfying_set(&g, 5).unwrap().into_iter().filter(|x| h.eval_unchecked(x)).collect();
        let gsize = brute_force_satisfying_set(&g, 5).unwrap().len() as f64;
        let exact = CheckCertificate {
            alpha: support.len() as f64 / gsize,
            kappa: gsize,
            samples: 1,
            hits: 1,
            g_fraction: gsize / 32.0,
            declared_samples: 1.0,
        };
        let outside: Assignment = "00000".parse().unwrap();
        assert_eq!(simulate_approx_eval(&outside, &exact, &g, &h).unwrap(), 0.0);
        let total: f64 = support.iter().map(|x| simulate_approx_eval(x, &exact, &g, &h).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for x in &support {
            let v = simulate_approx_eval(x, &exact, &g, &h).unwrap();
            assert_eq!(v, simulate_approx_eval(x, &exact, &g, &h).unwrap());
            assert!((v - 1.0 / support.len() as f64).abs() < 1e-12);
        }
        let cert = check(&g, &h, 0.1, 0.4, 0.5, &tools, &Budget::default(), &mut SeedTree::new(3).rng()).unwrap();
        let total: f64 = support.iter().map(|x| simulate_approx_eval(x, &cert, &g, &h).unwrap()).sum();
        let beta: f64 = 0.4 / 192.0;
        assert!(total >= 1.0 / (1.0 + beta).powi(2) - 0.05 && total <= (1.0 + beta).powi(2) + 0.05);
        let bad = CheckCertificate { alpha: 0.0, ..exact };
        assert!(matches!(
            simulate_approx_eval(&support[0], &bad, &g, &h),
            Err(Error::DegenerateCertificate { .. })
        ));
    }

    #[test]
    fn sampler_support_and_round_trip() {
        let (g, h) = small_pair();
        let tools = make_forward_tools(&g).unwrap();
        let s = InverseSampler::new(g.clone(), h.clone(), tools.sampler(0.01).unwrap(), 50, 0.01);
        let mut rng = SeedTree::new(4).rng();
        for _ in 0..2000 {
            if let Some(x) = s.generate(&mut rng) {
                assert!(g.eval_unchecked(&x) && h.eval_unchecked(&x));
            }
        }
        let spec = s.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: SamplerSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let s2 = InverseSampler::from_spec(&back).unwrap();
        assert_eq!(s2.conditional_support().unwrap(), s.conditional_support().unwrap());
        let empty = FeatureDisjunction::new(5, vec![], vec![]).unwrap();
        let never = InverseSampler::new(g, BoolFunc::FeatureDisjunction(empty), tools.sampler(0.01).unwrap(), 20, 0.01);
        assert!(never.generate(&mut rng).is_none());
    }

    #[test]
    fn check_rejects_bad_input() {
        let (g, h) = small_pair();
        let tools = make_forward_tools(&g).unwrap();
        let b = Budget::default();
        let mut rng = SeedTree::new(0).rng();
        assert!(check(&g, &h, 0.0, 0.4, 0.5, &tools, &b, &mut rng).unwrap_err().is_input_error());
        let h4 = BoolFunc::ConstTrue { n: 4 };
        assert!(check(&g, &h4, 0.1, 0.4, 0.5, &tools, &b, &mut rng).unwrap_err().is_input_error());
    }
}
