"""End-to-end diagnosis: bounded phi-squared certificate plus verified
geometric decay of the rho-mixing coefficients."""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .mixing import (DEFAULT_N_MAX, envelope, mixing_report, product_contraction_check,
                     submultiplicativity_check)
from .models import certify_assumptions
from .phi2 import bound_holds, phi2_report
from .stationary import stationary_covariances

ROUTE_RTOL = 1e-8
RESIDUAL_RTOL = 1e-10


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    gating: bool = True


@dataclass
class Diagnosis:
    model: object
    certificate: object
    phi2: object
    mixing: object
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.passed for c in self.checks if c.gating)

    def rho_table(self):
        rho = self.mixing.rho
        if self.mixing.fitted_A is None:
            env = [None] * len(rho)
        else:
            env = envelope(self.mixing.fitted_A, self.mixing.fitted_gamma, len(rho))
        return [(n, float(r), None if e is None else float(e))
                for n, r, e in zip(range(1, len(rho) + 1), rho, env)]

    def rho_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "rho", "envelope"])
        for n, r, e in self.rho_table():
            w.writerow([n, format(r, ".17g"), "" if e is None else format(e, ".17g")])
        return buf.getvalue()

    def to_dict(self):
        m = self.mixing
        return {
            "kind": self.model.kind, "p": self.model.p, "k": self.model.k,
            "certificate": self.certificate.to_dict(),
            "phi2": {
                "general": self.phi2.phi2_general, "closed": self.phi2.phi2_closed,
                "canonical": self.phi2.phi2_canonical, "log1p": self.phi2.log1p_phi2,
                "bound": self.phi2.bound,
                "canonical_corrs": [float(r) for r in self.phi2.canonical_corrs],
                "paper_bound_note": self.phi2.paper_bound_note,
            },
            "mixing": {
                "rho": [float(r) for r in m.rho], "fit_A": m.fitted_A,
                "fit_gamma": m.fitted_gamma, "kappa": m.kappa, "N": m.N,
            },
            "checks": [{"name": c.name, "passed": c.passed, "value": c.value,
                        "gating": c.gating} for c in self.checks],
            "ok": self.ok,
        }

    def render(self):
        c, f, m = self.certificate, self.phi2, self.mixing
        g = lambda v: "n/a" if v is None else format(v, ".10g")
        lines = [
            "model: %s  p=%d  k=%d" % (self.model.kind, self.model.p, self.model.k),
            "assumptions (delta=%s, zeta=%s%s):" % (g(c.delta), g(c.zeta),
                                                    "" if c.mu is None else ", mu=%s" % g(c.mu)),
            "  A1 rank/contraction  k=%d  ||T||=%s  %s" % (c.k_measured, g(c.transition_norm),
                                                         "pass" if c.a1_pass else "FAIL"),
            "  A2 lambda_min(Sigma_xi)=%s  %s" % (g(c.lambda_min_sigma_xi),
                                                 "pass" if c.a2_pass else "FAIL"),
            "  A3 lambda_max(Gamma)=%s  %s" % (g(c.lambda_max_gamma),
                                              "pass" if c.a3_pass else "FAIL"),
            "phi2 general   = %s" % g(f.phi2_general),
            "phi2 closed    = %s" % g(f.phi2_closed),
            "phi2 canonical = %s" % g(f.phi2_canonical),
            "phi2 bound     = %s  (phi2 <= bound: %s)" % (
                g(f.bound), "yes" if f.phi2_closed <= f.bound else "no"),
        ]
        if f.paper_bound_note:
            lines.append("note: " + f.paper_bound_note)
        lines.append("decay fit: A=%s gamma=%s  kappa=%s at N=%d" % (
            g(m.fitted_A), g(m.fitted_gamma), g(m.kappa), m.N))
        lines.append("%4s  %-24s %s" % ("n", "rho", "envelope"))
        for n, r, e in self.rho_table():
            lines.append("%4d  %-24s %s" % (n, format(r, ".17g"), g(e)))
        lines.append("checks:")
        for ch in self.checks:
            tag = "pass" if ch.passed else "FAIL"
            lines.append("  %-28s %s  %s%s" % (ch.name, tag, format(ch.value, ".3e"),
                                              "" if ch.gating else "  (informational)"))
        lines.append("status: %s" % ("ok" if self.ok else "CROSS-CHECK FAILURE"))
        return "\n".join(lines) + "\n"


def diagnose(model, delta, zeta, mu=None, n_max=DEFAULT_N_MAX):
    cov = stationary_covariances(model)
    cert = certify_assumptions(model, delta, zeta, cov.gamma, mu=mu)
    bound_mu = None
    if model.kind == "varma11":
        bound_mu = max(cert.transition_norm, mu or 0.0)
    rep = phi2_report(model, cov, delta, zeta, bound_mu)
    mix = mixing_report(model, cov.gamma, n_max)
    markov = model.kind == "var1"
    checks = [
        Check("lyapunov_residual", cov.residual <= RESIDUAL_RTOL, cov.residual),
        Check("route_equivalence", rep.route_gap() <= ROUTE_RTOL, rep.route_gap()),
    ]
    r1 = float(mix.rho[0]) if mix.n_max else 0.0
    top_factor = 1.0 / (1.0 - r1 * r1) - 1.0
    checks.append(Check("phi2_dominates_rho1", rep.phi2_closed >= top_factor * (1 - 1e-10) - 1e-14,
                        rep.phi2_closed - top_factor))
    if cert.passed:
        checks.append(Check("bound_soundness", bound_holds(rep.phi2_closed, rep.bound, model.k),
                            rep.bound - rep.phi2_closed))
    checks.append(Check("decay_envelope", mix.envelope_holds, 0.0))
    checks.append(Check("rho_non_increasing", mix.non_increasing,
                        float(np.max(np.diff(mix.rho), initial=0.0)), gating=markov))
    for N in (1, 2):
        sm = submultiplicativity_check(mix.rho, N)
        checks.append(Check("submultiplicative_N%d" % N, sm.passed, sm.worst, gating=markov))
    pc = product_contraction_check(mix.rho)
    checks.append(Check("markov_contraction", pc.passed, pc.worst, gating=markov))
    return Diagnosis(model=model, certificate=cert, phi2=rep, mixing=mix, checks=checks)

