//! Identity suite: every applicable identity of the framework checked on one
//! scenario.
//!
//! Checks run in this fixed order (`m{k}` is the k-th outcome of `m_basis`,
//! `nu{j}` the j-th reference outcome):
//!
//! | id | tag | needs |
//! |----|-----|-------|
//! | `pure-variance` | eq2 | pure state |
//! | `zero-error` | eq5 | pure state |
//! | `total-error` | eq6 | |
//! | `variance-split` | eq8 | |
//! | `residual/m{k}` | eq8 | pure state |
//! | `decomposition-estimate/m{k}` | eq11 | `nu_basis` |
//! | `decomposition-error/m{k}` | eq12 | `nu_basis` |
//! | `steering-transform/m{k}/nu{j}` | eq15 | `nu_basis` |
//! | `total-variance` | eq16 | `nu_basis` |
//! | `bayesian-estimate/m{k}` | eq19 | `[rho, A] = 0` |
//! | `bayesian-residual/m{k}` | eq20 | `[rho, A] = 0` |
//! | `averaged-squares/m{k}` | eq24 | `[rho, A] = 0` and `nu_basis` |
//!
//! The last three rows run outcome by outcome: all three checks for `m0`,
//! then for `m1`, and so on.
//!
//! A check whose requirement is not met, or whose outcome or branch is too
//! improbable to define a weak value, is recorded as skipped with the reason.
//! Any other failure of the underlying computation becomes an error record.

use super::report::{CheckRecord, Report};
use super::scenario::{Scenario, ScenarioState};
use crate::contextual::{
    common_eigenbasis, contextual_variance, mixed_weak_value, residual_error, total_error, variance,
    zero_error_residual, DensityOperator, EPS_PROB,
};
use crate::contextual::{classical_commuting_stats, HermitianObservable};
use crate::error::{Error, Result};
use crate::hilbert::{Complex, Ket};
use crate::steering::{
    conditional_states, decomposition_estimate, equivalence_check, steering_transform_check,
    total_variance_decomposition,
};

/// Runs the suite at the scenario's tolerance.
pub fn run_identity_suite(s: &Scenario) -> Report {
    run_identity_suite_with_tolerance(s, s.tolerance())
}

pub fn run_identity_suite_with_tolerance(s: &Scenario, tol: f64) -> Report {
    let mut suite = Suite { report: Report::new(s.name()), tol };
    let rho = s.density();
    let a = s.observable();
    let m_basis = s.m_basis();
    let psi = pure_ket(s, &rho);

    match &psi {
        Some(psi) => {
            suite.check("pure-variance", "eq2", || {
                Ok((re(contextual_variance(psi, m_basis, a)?.variance), re(variance(&rho, a)?)))
            });
            suite.check("zero-error", "eq5", || Ok((re(zero_error_residual(psi, m_basis, a)?), re(0.0))));
        }
        None => {
            suite.skip("pure-variance", "eq2", "mixed preparation");
            suite.skip("zero-error", "eq5", "mixed preparation");
        }
    }

    suite.check("total-error", "eq6", || {
        let mut rhs = 0.0;
        for m in m_basis {
            let p = rho.probability(m)?;
            rhs += if p >= EPS_PROB { p * residual_error(&rho, m, a)? } else { sandwich_a_rho_a(&rho, a, m)? };
        }
        Ok((re(total_error(&rho, m_basis, a)?), re(rhs)))
    });

    suite.check("variance-split", "eq8", || {
        let (mut second, mut residual, mut mean) = (0.0, 0.0, Complex::new(0.0, 0.0));
        for m in m_basis {
            let p = rho.probability(m)?;
            if p >= EPS_PROB {
                let w = mixed_weak_value(&rho, m, a)?;
                second += p * w.norm_sqr();
                residual += p * residual_error(&rho, m, a)?;
                mean += w * p;
            } else {
                second += sandwich_a_rho_a(&rho, a, m)?;
                mean += a.matrix().matmul(rho.matrix())?.sandwich(m.amps(), m.amps())?;
            }
        }
        Ok((re(variance(&rho, a)?), re(second + residual - mean.norm_sqr())))
    });

    for (k, m) in m_basis.iter().enumerate() {
        let id = format!("residual/m{k}");
        if psi.is_some() {
            suite.check(&id, "eq8", || Ok((re(residual_error(&rho, m, a)?), re(0.0))));
        } else {
            suite.skip(&id, "eq8", "mixed preparation; residual compared with the branch spread under eq12");
        }
    }

    steering_checks(&mut suite, s, &rho);
    commuting_checks(&mut suite, s, &rho);
    suite.report
}

fn steering_checks(suite: &mut Suite, s: &Scenario, rho: &DensityOperator) {
    let a = s.observable();
    let m_basis = s.m_basis();
    let n = m_basis.dim();
    let Some(nu_basis) = s.nu_basis() else {
        for k in 0..n {
            suite.skip(&format!("decomposition-estimate/m{k}"), "eq11", "no nu_basis");
            suite.skip(&format!("decomposition-error/m{k}"), "eq12", "no nu_basis");
        }
        suite.skip("steering-transform", "eq15", "no nu_basis");
        suite.skip("total-variance", "eq16", "no nu_basis");
        return;
    };
    let e = s.bipartite();
    let dec = match conditional_states(&e, nu_basis) {
        Ok(d) => d,
        Err(err) => {
            suite.error("conditional-states", "eq11", &err);
            return;
        }
    };

    for (k, m) in m_basis.iter().enumerate() {
        suite.check(&format!("decomposition-estimate/m{k}"), "eq11", || {
            Ok((decomposition_estimate(&dec, m, a)?.estimate, mixed_weak_value(rho, m, a)?))
        });
    }
    for (k, m) in m_basis.iter().enumerate() {
        suite.check(&format!("decomposition-error/m{k}"), "eq12", || {
            Ok((re(decomposition_estimate(&dec, m, a)?.error()), re(residual_error(rho, m, a)?)))
        });
    }

    let lambda = rho.eigen().vectors;
    for (k, m) in m_basis.iter().enumerate() {
        for (j, branch) in dec.states.iter().enumerate() {
            let id = format!("steering-transform/m{k}/nu{j}");
            match branch {
                Some(psi_nu) => suite.check(&id, "eq15", || {
                    let t = steering_transform_check(psi_nu, &lambda, m, a)?;
                    Ok((t.lhs, t.rhs))
                }),
                None => suite.skip(&id, "eq15", "reference outcome has probability below EPS_PROB"),
            }
        }
    }

    match total_variance_decomposition(&e, m_basis, nu_basis, a) {
        Ok((table, total)) => {
            suite.check("total-variance", "eq16", || Ok((re(total), re(variance(rho, a)?))));
            suite.report.table = Some(table);
        }
        Err(err) => suite.error("total-variance", "eq16", &err),
    }
}

fn commuting_checks(suite: &mut Suite, s: &Scenario, rho: &DensityOperator) {
    let a = s.observable();
    let m_basis = s.m_basis();
    let n = m_basis.dim();
    let ids = |k: usize| {
        [
            (format!("bayesian-estimate/m{k}"), "eq19"),
            (format!("bayesian-residual/m{k}"), "eq20"),
            (format!("averaged-squares/m{k}"), "eq24"),
        ]
    };
    let skip_all = |suite: &mut Suite, reason: &str| {
        for k in 0..n {
            for (id, tag) in ids(k) {
                suite.skip(&id, tag, reason);
            }
        }
    };
    match common_eigenbasis(rho, a) {
        Err(Error::Commutation { norm }) => {
            skip_all(suite, &format!("rho and A do not commute (max |[rho, A]| = {norm:e})"));
            return;
        }
        Err(err) => {
            suite.error("common-eigenbasis", "eq19", &err);
            return;
        }
        Ok(_) => {}
    }
    let rows = match classical_commuting_stats(rho, m_basis, a) {
        Ok(rows) => rows,
        Err(err) => {
            suite.error("bayesian-rows", "eq19", &err);
            return;
        }
    };
    let e = s.bipartite();
    for (k, (m, row)) in m_basis.iter().zip(&rows).enumerate() {
        let [(est_id, _), (res_id, _), (sq_id, _)] = ids(k);
        suite.check(&est_id, "eq19", || {
            let est = row.estimate.ok_or_else(|| Error::undefined("Bayesian estimate", row.probability))?;
            Ok((re(est), mixed_weak_value(rho, m, a)?))
        });
        suite.check(&res_id, "eq20", || {
            let res = row.residual.ok_or_else(|| Error::undefined("Bayesian residual", row.probability))?;
            Ok((re(res), re(residual_error(rho, m, a)?)))
        });
        match s.nu_basis() {
            Some(nu) => suite.check(&sq_id, "eq24", || {
                let eq = equivalence_check(&e, m, nu, a)?;
                Ok((re(eq.lhs), re(eq.rhs)))
            }),
            None => suite.skip(&sq_id, "eq24", "no nu_basis"),
        }
    }
}

struct Suite {
    report: Report,
    tol: f64,
}

impl Suite {
    fn check(&mut self, id: &str, tag: &str, f: impl FnOnce() -> Result<(Complex, Complex)>) {
        let record = match f() {
            Ok((lhs, rhs)) => CheckRecord::compare(id, tag, lhs, rhs, self.tol),
            Err(err @ Error::UndefinedWeakValue { .. }) => CheckRecord::skipped(id, tag, err.to_string(), self.tol),
            Err(err) => CheckRecord::error(id, tag, err.to_string(), self.tol),
        };
        self.report.checks.push(record);
    }

    fn skip(&mut self, id: &str, tag: &str, reason: &str) {
        self.report.checks.push(CheckRecord::skipped(id, tag, reason, self.tol));
    }

    fn error(&mut self, id: &str, tag: &str, err: &Error) {
        self.report.checks.push(CheckRecord::error(id, tag, err.to_string(), self.tol));
    }
}

fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

/// `<m|A rho A|m>`.
fn sandwich_a_rho_a(rho: &DensityOperator, a: &HermitianObservable, m: &Ket) -> Result<f64> {
    let ara = a.matrix().matmul(rho.matrix())?.matmul(a.matrix())?;
    Ok(ara.sandwich(m.amps(), m.amps())?.re)
}

/// The state vector when the preparation is pure.
fn pure_ket(s: &Scenario, rho: &DensityOperator) -> Option<Ket> {
    match s.state() {
        ScenarioState::Pure(psi) => Some(psi.clone()),
        _ if rho.is_pure() => rho.eigen().vectors.kets().first().cloned(),
        _ => None,
    }
}
