#!/usr/bin/env python3
# Copyright 2026 dcal contributors
# SPDX-License-Identifier: Apache-2.0
"""Generate tests/expected_values.hpp.

Reference values for the C++ test suite, computed with independent
implementations: scipy's HiGHS LP solver, closed-form integrals, and numpy
arithmetic.  The C++ code under test must reproduce these numbers within the
tolerances stated next to each constant.

Run:  python3 tests/oracle/gen_expected.py > tests/expected_values.hpp

The script is self-checking: it asserts internal consistency (closed forms vs
numerical quadrature, reduced vs full LP formulations, weak duality, known
hand-derivable values) and fails loudly rather than emitting bad constants.
"""

import math
import sys

import numpy as np
from scipy import integrate, optimize, stats


# --------------------------------------------------------------------------
# Truncated noise mechanisms (closed forms)
# --------------------------------------------------------------------------

class TruncLaplace:
    """Additive Laplace-family noise conditioned on the output in [0,1].

    Untruncated density proportional to tau^{|p-q|}, tau in (0,1).
    """

    def __init__(self, tau):
        assert 0.0 < tau < 1.0
        self.tau = tau
        self.lam = -math.log(tau)  # rate: tau^x = exp(-lam*x)

    def z(self, q):
        return 2.0 - self.tau ** q - self.tau ** (1.0 - q)

    def pdf(self, q, p):
        return self.lam * self.tau ** abs(p - q) / self.z(q)

    def cdf(self, q, p):
        t, zq = self.tau, self.z(q)
        if p <= q:
            return (t ** (q - p) - t ** q) / zq
        return ((1.0 - t ** q) + (1.0 - t ** (p - q))) / zq

    def e_abs(self, q):
        """E|M(q) - q| in closed form."""
        t, lam = self.tau, self.lam
        num = 2.0 - t ** q * (1.0 + lam * q) - t ** (1.0 - q) * (1.0 + lam * (1.0 - q))
        return num / (lam * self.z(q))

    def max_e_abs(self, step=1e-3):
        qs = np.arange(0.0, 1.0 + step / 2, step)
        return max(self.e_abs(q) for q in qs)


class TruncGauss:
    """Additive Gaussian noise (std dev sigma) conditioned on [0,1]."""

    def __init__(self, sigma):
        assert sigma > 0.0
        self.sigma = sigma

    def z(self, q):
        s = self.sigma
        return stats.norm.cdf((1.0 - q) / s) - stats.norm.cdf(-q / s)

    def pdf(self, q, p):
        s = self.sigma
        return stats.norm.pdf((p - q) / s) / (s * self.z(q))

    def cdf(self, q, p):
        s = self.sigma
        return (stats.norm.cdf((p - q) / s) - stats.norm.cdf(-q / s)) / self.z(q)

    def e_abs(self, q):
        s = self.sigma
        a, b = -q / s, (1.0 - q) / s
        return s * (2.0 * stats.norm.pdf(0.0) - stats.norm.pdf(a) - stats.norm.pdf(b)) / self.z(q)

    def max_e_abs(self, step=1e-3):
        qs = np.arange(0.0, 1.0 + step / 2, step)
        return max(self.e_abs(q) for q in qs)


def laplace_for_budget(eps):
    return TruncLaplace(math.exp(-math.sqrt(1.0 / (2.0 * eps))))


def gauss_for_budget(eps, variant):
    if variant == "lemma":
        return TruncGauss(math.sqrt(2.0 * eps * math.log(1.25 / math.sqrt(eps))))
    assert variant == "improved"
    return TruncGauss(math.sqrt(eps))


def gauss_gamma_eff(eps):
    """The gamma satisfying 1 - e^{-gamma*eps} = min(2*sqrt(eps), 1-1e-12)."""
    bound = min(2.0 * math.sqrt(eps), 1.0 - 1e-12)
    return -math.log(1.0 - bound) / eps


# Cross-check closed forms against adaptive quadrature.
def _check_noise_closed_forms():
    for mech, q in [
        (TruncLaplace(math.exp(-1.0)), 0.37),
        (TruncLaplace(math.exp(-7.0710678)), 0.0),
        (TruncLaplace(0.5), 0.91),
        (TruncGauss(0.2), 0.3),
        (TruncGauss(0.05), 0.97),
    ]:
        norm, _ = integrate.quad(lambda p: mech.pdf(q, p), 0.0, 1.0,
                                 points=[q], limit=200, epsabs=1e-12)
        assert abs(norm - 1.0) < 1e-9, (mech, q, norm)
        ea, _ = integrate.quad(lambda p: abs(p - q) * mech.pdf(q, p), 0.0, 1.0,
                               points=[q], limit=200, epsabs=1e-12)
        assert abs(ea - mech.e_abs(q)) < 1e-9, (mech, q, ea, mech.e_abs(q))
        for p in (0.0, 0.2, q, 0.8, 1.0):
            ci, _ = integrate.quad(lambda t: mech.pdf(q, t), 0.0, p,
                                   points=[q] if q < p else None,
                                   limit=200, epsabs=1e-12)
            assert abs(ci - mech.cdf(q, p)) < 1e-9, (mech, q, p)


_check_noise_closed_forms()


def tv_distance(mech, b, q):
    val, _ = integrate.quad(lambda p: abs(mech.pdf(b, p) - mech.pdf(q, p)),
                            0.0, 1.0, points=[b, q], limit=400, epsabs=1e-12)
    return 0.5 * val


# --------------------------------------------------------------------------
# Finite joints and couplings
# --------------------------------------------------------------------------

class Joint:
    """values ascending, per-value state-1 mass m1 and state-0 mass m0."""

    def __init__(self, values, m1, m0):
        order = np.argsort(values)
        self.values = np.asarray(values, dtype=float)[order]
        self.m1 = np.asarray(m1, dtype=float)[order]
        self.m0 = np.asarray(m0, dtype=float)[order]
        tot = float(np.sum(self.m1) + np.sum(self.m0))
        assert tot > 0
        self.m1 /= tot
        self.m0 /= tot

    @property
    def w(self):
        return self.m1 + self.m0

    @property
    def post(self):
        return self.m1 / self.w

    def ece(self):
        return float(np.sum(self.w * np.abs(self.values - self.post)))

    def atoms(self):
        """(value, theta, mass) with mass > 0."""
        out = []
        for x, a1, a0 in zip(self.values, self.m1, self.m0):
            if a0 > 0:
                out.append((x, 0, a0))
            if a1 > 0:
                out.append((x, 1, a1))
        return out


def joint_from_posteriors(values, posts, weights):
    w = np.asarray(weights, dtype=float)
    p = np.asarray(posts, dtype=float)
    return Joint(values, w * p, w * (1.0 - p))


# --------------------------------------------------------------------------
# LP-based metrics (scipy HiGHS)
# --------------------------------------------------------------------------

def lp_max(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, bounds=None):
    res = optimize.linprog(-np.asarray(c, dtype=float),
                           A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                           bounds=bounds, method="highs")
    assert res.status == 0, res
    return -res.fun, res.x


def smooth_cal(joint):
    k = len(joint.values)
    c = joint.w * (joint.values - joint.post)
    rows, rhs = [], []
    for i in range(k - 1):
        gap = joint.values[i + 1] - joint.values[i]
        r = np.zeros(k)
        r[i + 1], r[i] = 1.0, -1.0
        rows.append(r.copy())
        rhs.append(gap)
        rows.append(-r)
        rhs.append(gap)
    val, _ = lp_max(c, a_ub=np.array(rows) if rows else None,
                    b_ub=np.array(rhs) if rhs else None,
                    bounds=[(-1.0, 1.0)] * k)
    return val


def dtc_b_columns(joint, m):
    cols = set(float(i) / m for i in range(m + 1))
    cols.update(float(v) for v in joint.values)
    cols.update(float(p) for p in joint.post)
    return sorted(cols)


def dtc_primal(joint, m=200, b_cols=None):
    atoms = joint.atoms()
    b = dtc_b_columns(joint, m) if b_cols is None else sorted(set(b_cols))
    na, nb = len(atoms), len(b)
    nv = na * nb
    cost = np.zeros(nv)
    a_eq = np.zeros((na + nb, nv))
    b_eq = np.zeros(na + nb)
    for ai, (x, th, mass) in enumerate(atoms):
        b_eq[ai] = mass
        for bj, bv in enumerate(b):
            v = ai * nb + bj
            cost[v] = abs(x - bv)
            a_eq[ai, v] = 1.0
            a_eq[na + bj, v] = th - bv
    val, _ = lp_max(-cost, a_eq=a_eq, b_eq=b_eq, bounds=[(0.0, None)] * nv)
    return -val


def dtc_dual(joint, m=200, b_cols=None):
    atoms = joint.atoms()
    b = dtc_b_columns(joint, m) if b_cols is None else sorted(set(b_cols))
    na, nb = len(atoms), len(b)
    # vars: r_a (free) then s_j in [-1,1]
    c = np.concatenate([np.array([mass for (_, _, mass) in atoms]), np.zeros(nb)])
    rows, rhs = [], []
    for ai, (x, th, _) in enumerate(atoms):
        for bj, bv in enumerate(b):
            r = np.zeros(na + nb)
            r[ai] = 1.0
            r[na + bj] = -(th - bv)
            rows.append(r)
            rhs.append(abs(bv - x))
    val, _ = lp_max(c, a_ub=np.array(rows), b_ub=np.array(rhs),
                    bounds=[(None, None)] * na + [(-1.0, 1.0)] * nb)
    return val


def score_lp_reduced(knots, c_g, c_s):
    """maximize c_g . G + c_s . g over convex bounded tangent systems.

    Consecutive-slope convexity rows plus the four corner boundedness rows
    (the extreme tangent values at theta = 0 and theta = 1).
    """
    u = np.asarray(knots, dtype=float)
    n = len(u)
    rows, rhs = [], []

    def row():
        return np.zeros(2 * n)

    for j in range(n - 1):
        d = u[j + 1] - u[j]
        r = row()  # g_j * d - (G_{j+1} - G_j) <= 0
        r[n + j] = d
        r[j] = 1.0
        r[j + 1] = -1.0
        rows.append(r)
        rhs.append(0.0)
        r = row()  # (G_{j+1} - G_j) - g_{j+1} * d <= 0
        r[j] = -1.0
        r[j + 1] = 1.0
        r[n + j + 1] = -d
        rows.append(r)
        rhs.append(0.0)
    r = row()  # tangent at first knot, theta=0:  G_0 - g_0 u_0 <= 1
    r[0] = 1.0
    r[n] = -u[0]
    rows.append(r)
    rhs.append(1.0)
    r = row()  # tangent at last knot, theta=0:  -(G_l - g_l u_l) <= 0
    r[n - 1] = -1.0
    r[2 * n - 1] = u[n - 1]
    rows.append(r)
    rhs.append(0.0)
    r = row()  # tangent at last knot, theta=1:  G_l + g_l (1 - u_l) <= 1
    r[n - 1] = 1.0
    r[2 * n - 1] = 1.0 - u[n - 1]
    rows.append(r)
    rhs.append(1.0)
    r = row()  # tangent at first knot, theta=1:  -(G_0 + g_0 (1 - u_0)) <= 0
    r[0] = -1.0
    r[n] = -(1.0 - u[0])
    rows.append(r)
    rhs.append(0.0)

    c = np.concatenate([c_g, c_s])
    bounds = [(0.0, 1.0)] * n + [(-1.0, 1.0)] * n
    val, x = lp_max(c, a_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds)
    return val, x


def score_lp_full(knots, c_g, c_s):
    """Same LP with all-pairs supporting-line rows and per-knot boundedness."""
    u = np.asarray(knots, dtype=float)
    n = len(u)
    rows, rhs = [], []
    for j in range(n):
        for l in range(n):
            if j == l:
                continue
            r = np.zeros(2 * n)  # G_j + g_j (u_l - u_j) - G_l <= 0
            r[j] = 1.0
            r[n + j] = u[l] - u[j]
            r[l] -= 1.0
            rows.append(r)
            rhs.append(0.0)
        for theta in (0.0, 1.0):
            r = np.zeros(2 * n)  # G_j + g_j (theta - u_j) <= 1
            r[j] = 1.0
            r[n + j] = theta - u[j]
            rows.append(r)
            rhs.append(1.0)
            rows.append(-r)  # -(...) <= 0
            rhs.append(0.0)
    c = np.concatenate([c_g, c_s])
    val, x = lp_max(c, a_ub=np.array(rows), b_ub=np.array(rhs),
                    bounds=[(None, None)] * 2 * n)
    return val, x


def cdl_objective(joint, knots):
    u = list(knots)
    idx = {v: i for i, v in enumerate(u)}
    n = len(u)
    c_g, c_s = np.zeros(n), np.zeros(n)
    for x, w, ph in zip(joint.values, joint.w, joint.post):
        c_g[idx[float(ph)]] += w
        c_g[idx[float(x)]] -= w
        c_s[idx[float(x)]] -= w * (ph - x)
    return c_g, c_s


def cdl_lp(joint, full=False):
    knots = sorted(set([float(v) for v in joint.values] +
                       [float(p) for p in joint.post]))
    c_g, c_s = cdl_objective(joint, knots)
    fn = score_lp_full if full else score_lp_reduced
    val, _ = fn(knots, c_g, c_s)
    return val


def decision_loss(atoms, full=False):
    """atoms: (q, b, theta, mass); maximize E[S(b,theta) - S(q,theta)]."""
    knots = sorted(set([float(a[0]) for a in atoms] + [float(a[1]) for a in atoms]))
    idx = {v: i for i, v in enumerate(knots)}
    n = len(knots)
    c_g, c_s = np.zeros(n), np.zeros(n)
    for q, b, th, mass in atoms:
        c_g[idx[float(b)]] += mass
        c_s[idx[float(b)]] += mass * (th - b)
        c_g[idx[float(q)]] -= mass
        c_s[idx[float(q)]] -= mass * (th - q)
    fn = score_lp_full if full else score_lp_reduced
    val, _ = fn(knots, c_g, c_s)
    return val


# V-shaped scores -----------------------------------------------------------

def vshape(mu, p, theta):
    m = max(mu, 1.0 - mu)
    lo = 0.5 - 0.5 * (theta - mu) / m
    hi = 0.5 + 0.5 * (theta - mu) / m
    return lo if p <= mu else hi


def swap_regret_vshape(joint, mu):
    total = 0.0
    for x, w, ph in zip(joint.values, joint.w, joint.post):
        e_post = (1.0 - ph) * vshape(mu, ph, 0.0) + ph * vshape(mu, ph, 1.0)
        e_pred = (1.0 - ph) * vshape(mu, x, 0.0) + ph * vshape(mu, x, 1.0)
        total += w * (e_post - e_pred)
    return total


def vshape_candidates(joint):
    base = sorted(set([0.0, 1.0] + [float(v) for v in joint.values] +
                      [float(p) for p in joint.post]))
    mids = [(base[i] + base[i + 1]) / 2.0 for i in range(len(base) - 1)]
    return sorted(set(base + mids))


def cdl_vshape(joint):
    best_v, best_mu = -1.0, 0.0
    for mu in vshape_candidates(joint):
        v = swap_regret_vshape(joint, mu)
        if v > best_v:
            best_v, best_mu = v, mu
    return best_v, best_mu


# --------------------------------------------------------------------------
# Adversarial instances
# --------------------------------------------------------------------------

def batch_lb_atoms(eps):
    """Coupling atoms (q, b, theta, mass) of the tight batch instance."""
    r = math.sqrt(eps)
    lo, hi = 0.5 - r, 0.5 + r
    half = (1.0 - r) / 2.0
    return [
        (lo, lo, 1, half * lo),
        (lo, lo, 0, half * (1.0 - lo)),
        (hi, hi, 1, half * hi),
        (hi, hi, 0, half * (1.0 - hi)),
        (lo, 0.5, 1, r / 2.0),
        (hi, 0.5, 0, r / 2.0),
    ]


def q_marginal(atoms):
    vals, m1, m0 = {}, {}, {}
    for q, _, th, mass in atoms:
        vals.setdefault(q, 0.0)
        m1.setdefault(q, 0.0)
        m0.setdefault(q, 0.0)
        if th == 1:
            m1[q] += mass
        else:
            m0[q] += mass
    vs = sorted(vals)
    return Joint(vs, [m1[v] for v in vs], [m0[v] for v in vs])


def b_marginal(atoms):
    m1, m0 = {}, {}
    for _, b, th, mass in atoms:
        m1.setdefault(b, 0.0)
        m0.setdefault(b, 0.0)
        if th == 1:
            m1[b] += mass
        else:
            m0[b] += mass
    vs = sorted(m1)
    return Joint(vs, [m1[v] for v in vs], [m0[v] for v in vs])


def collapse_to_posterior(atoms):
    """Replace q by the posterior of q under the coupling's q-marginal."""
    qm = q_marginal(atoms)
    post = {float(v): float(p) for v, p in zip(qm.values, qm.post)}
    return [(post[q], b, th, mass) for (q, b, th, mass) in atoms]


def dist(atoms):
    return sum(mass * abs(q - b) for q, b, _, mass in atoms)


# --------------------------------------------------------------------------
# Analytic pushforward (batch post-processing)
# --------------------------------------------------------------------------

def pushforward(mech, joint, bins):
    edges = np.arange(bins + 1, dtype=float) / bins
    centers = (np.arange(bins, dtype=float) + 0.5) / bins
    out1 = np.zeros(bins)
    out0 = np.zeros(bins)
    for x, a1, a0 in zip(joint.values, joint.m1, joint.m0):
        cdfs = np.array([mech.cdf(x, e) for e in edges])
        cell = np.diff(cdfs)
        out1 += a1 * cell
        out0 += a0 * cell
    keep = (out1 + out0) > 0.0
    return Joint(centers[keep], out1[keep], out0[keep])


def pushforward_coupling(mech, atoms, bins):
    """Extend (q,b,theta,mass) atoms through the mechanism analytically."""
    edges = np.arange(bins + 1, dtype=float) / bins
    centers = (np.arange(bins, dtype=float) + 0.5) / bins
    cell_cache = {}
    out = []
    for q, b, th, mass in atoms:
        if q not in cell_cache:
            cdfs = np.array([mech.cdf(q, e) for e in edges])
            cell_cache[q] = np.diff(cdfs)
        for c, cm in zip(centers, cell_cache[q]):
            if cm > 0.0:
                out.append((float(c), b, th, mass * float(cm)))
    return out


# --------------------------------------------------------------------------
# Emit helpers
# --------------------------------------------------------------------------

OUT = []


def emit(line=""):
    OUT.append(line)


def const(name, value, comment=""):
    tail = "  // " + comment if comment else ""
    emit(f"inline constexpr double {name} = {float(value)!r};{tail}")


def const_arr(name, values, comment=""):
    if comment:
        emit(f"// {comment}")
    body = ", ".join(repr(float(v)) for v in values)
    emit(f"inline constexpr double {name}[] = {{{body}}};")


def run():
    eps_grid = [0.0025, 0.005, 0.01, 0.02, 0.04]

    emit("// Generated by tests/oracle/gen_expected.py; do not edit by hand.")
    emit("// Reference values from independent implementations (scipy HiGHS,")
    emit("// closed-form integrals).  Regenerate with:")
    emit("//   python3 tests/oracle/gen_expected.py > tests/expected_values.hpp")
    emit("#pragma once")
    emit()
    emit("namespace dcal::expected {")
    emit()

    # ---- two-point near-coin joint (values 0.4999 / 0.5001) ----
    t1 = joint_from_posteriors([0.4999, 0.5001], [1.0, 0.0], [0.5, 0.5])
    assert abs(t1.ece() - 0.5001) < 1e-15
    sm = smooth_cal(t1)
    assert abs(sm - 5.001e-5) < 1e-12, sm
    dp = dtc_primal(t1, 200)
    assert 5e-5 <= dp <= 1.1e-4, dp
    clp = cdl_lp(t1)
    clp_full = cdl_lp(t1, full=True)
    assert abs(clp - clp_full) < 1e-9, (clp, clp_full)
    assert abs(clp - 1.0) < 1e-9, clp
    cvs, cmu = cdl_vshape(t1)
    assert abs(cvs - 1.0) < 1e-12 and abs(cmu - 0.5) < 1e-12
    emit("// Two-point joint {0.4999 -> posterior 1, 0.5001 -> posterior 0}.")
    const("kTwoPointEce", t1.ece(), "exact")
    const("kTwoPointSmcal", sm, "LP optimum; tol 1e-9")
    const("kTwoPointDtc", dp, "grid m=200 + support + posteriors; tol 1e-7")
    const("kTwoPointCdlLp", clp, "tol 1e-7")
    const("kTwoPointCdlVshape", cvs, "tol 1e-12")
    const("kTwoPointCdlVshapeMu", cmu, "midpoint candidate")
    emit()

    # ---- single-value joint {0.3 -> posterior 0.26} ----
    j26 = joint_from_posteriors([0.3], [0.26], [1.0])
    v26, mu26 = cdl_vshape(j26)
    lp26 = cdl_lp(j26)
    lp26f = cdl_lp(j26, full=True)
    assert abs(lp26 - lp26f) < 1e-9
    assert abs(lp26 - 0.04 / 0.7) < 1e-9, lp26
    assert abs(v26 - 0.02 / 0.72) < 1e-12, v26
    assert abs(mu26 - 0.28) < 1e-12
    emit("// Single-value joint {0.3 -> posterior 0.26}.")
    const("kJ26CdlLp", lp26, "= 0.04/0.7; tol 1e-7")
    const("kJ26CdlVshape", v26, "= 0.02/0.72 at mu=0.28; tol 1e-12")
    const("kJ26CdlVshapeMu", mu26)
    const("kJ26Smcal", smooth_cal(j26), "= 0.04; tol 1e-9")
    const("kJ26Dtc", dtc_primal(j26, 200), "= 0.04 (0.26 = 52/200 on-grid); tol 1e-7")
    emit()

    # ---- three fixed regression joints ----
    fixed = {
        "J1": ([0.1, 0.35, 0.62, 0.9], [0.3, 0.2, 0.7, 0.85], [0.2, 0.3, 0.4, 0.1]),
        "J2": ([0.25, 0.75], [0.6, 0.4], [0.5, 0.5]),
        "J3": ([0.05, 0.2, 0.4, 0.55, 0.7, 0.95],
               [0.0, 0.35, 0.5, 0.45, 0.9, 1.0],
               [0.1, 0.2, 0.3, 0.1, 0.2, 0.1]),
    }
    for name, (vals, posts, ws) in fixed.items():
        j = joint_from_posteriors(vals, posts, ws)
        e = j.ece()
        s = smooth_cal(j)
        d = dtc_primal(j, 200)
        dd = dtc_dual(j, 200)
        assert dd <= d + 1e-7 and d <= dd + 1e-6, (name, d, dd)
        c_lp = cdl_lp(j)
        c_lp_f = cdl_lp(j, full=True)
        assert abs(c_lp - c_lp_f) < 1e-8, (name, c_lp, c_lp_f)
        c_vs, c_mu = cdl_vshape(j)
        assert c_vs <= c_lp + 1e-9 and c_lp <= 2.0 * e + 1e-9
        # Two-sided sandwich with the provable constants (1/2, 2).
        assert 0.5 * d - 1.0 / 200 <= s + 1e-9 and s <= 2.0 * d + 1e-7, (name, s, d)
        emit(f"// Regression joint {name}: values {vals}, posteriors {posts},")
        emit(f"// weights {ws} (state masses = weight*posterior).")
        const(f"k{name}Ece", e, "tol 1e-12")
        const(f"k{name}Smcal", s, "tol 1e-8")
        const(f"k{name}DtcPrimal", d, "m=200 defaults; tol 1e-7")
        const(f"k{name}CdlLp", c_lp, "tol 1e-7")
        const(f"k{name}CdlVshape", c_vs, "tol 1e-10")
        const(f"k{name}CdlVshapeMu", c_mu)
        emit()

    # ---- batch lower-bound instance, eps = 0.04 ----
    eps = 0.04
    atoms = batch_lb_atoms(eps)
    assert abs(sum(a[3] for a in atoms) - 1.0) < 1e-15
    assert abs(dist(atoms) - eps) < 1e-15
    bm = b_marginal(atoms)
    assert np.allclose(bm.values, [0.3, 0.5, 0.7])
    assert np.allclose(bm.post, bm.values, atol=1e-15)  # calibrated
    qm = q_marginal(atoms)
    assert np.allclose(qm.values, [0.3, 0.7])
    assert np.allclose(qm.post, [0.44, 0.56], atol=1e-15)
    assert abs(qm.ece() - 0.14) < 1e-15

    # E[S_{1/2}] under the posterior-collapsed marginal and under b.
    collapsed = collapse_to_posterior(atoms)
    e_q = sum(mass * vshape(0.5, q, th) for q, _, th, mass in collapsed)
    e_b = sum(mass * vshape(0.5, b, th) for _, b, th, mass in collapsed)
    assert abs(e_q - 0.56) < 1e-12 and abs(e_b - 0.66) < 1e-12
    gap = e_b - e_q
    assert abs(gap - math.sqrt(eps) / 2.0) < 1e-12

    dl_collapsed = decision_loss(collapsed)
    dl_collapsed_f = decision_loss(collapsed, full=True)
    assert abs(dl_collapsed - dl_collapsed_f) < 1e-9
    closed = math.sqrt(eps) / 2 + eps / 2 - eps ** 1.5
    assert abs(dl_collapsed - closed) < 1e-9, (dl_collapsed, closed)

    sm_qm = smooth_cal(qm)
    assert abs(sm_qm - 0.028) < 1e-12
    d50 = dtc_primal(qm, 50)
    d200 = dtc_primal(qm, 200)
    assert abs(d50 - eps) < 1e-9 and abs(d200 - eps) < 1e-9

    # Explicit dual witness.  The flat rule s = sign(1/2 - b) * t with
    # t = 2 sqrt(eps)/(2 sqrt(eps)+1) does NOT certify eps: columns just past
    # 1/2 drag the r(lo,1) row minimum to sqrt(eps) - t/2 + O(eps).  A correct
    # witness interpolates continuously between +-t across the central band:
    #   s(b) = t                  for b <= 1/2 - sqrt(eps)
    #   s(b) = (1/2 - b)/(1 - b)  for 1/2 - sqrt(eps) <= b <= 1/2
    #   s(b) = (1/2 - b)/b        for 1/2 <= b <= 1/2 + sqrt(eps)
    #   s(b) = -t                 for b >= 1/2 + sqrt(eps)
    tt = 2.0 * math.sqrt(eps) / (2.0 * math.sqrt(eps) + 1.0)
    rr = math.sqrt(eps)

    def s_witness(b):
        if b <= 0.5 - rr:
            return tt
        if b <= 0.5:
            return (0.5 - b) / (1.0 - b)
        if b <= 0.5 + rr:
            return (0.5 - b) / b
        return -tt

    bcols = dtc_b_columns(qm, 50)

    def eval_witness(svals):
        total = 0.0
        for x, th, mass in qm.atoms():
            r = min(abs(b - x) + (th - b) * svals[b] for b in bcols)
            total += mass * r
        return total

    witness = eval_witness({b: s_witness(b) for b in bcols})
    assert abs(witness - eps) < 1e-12, witness
    flat = eval_witness(
        {b: (tt if b < 0.5 else (-tt if b > 0.5 else 0.0)) for b in bcols})
    assert flat < eps - 0.01, flat  # the flat rule provably under-certifies

    emit("// Batch adversarial instance at eps = 0.04.")
    const("kBatchLbDist", dist(atoms), "exact")
    const("kBatchLbQmEce", qm.ece(), "= sqrt(eps)/2 + eps")
    const("kBatchLbQmSmcal", sm_qm, "tol 1e-9")
    const("kBatchLbQmDtc50", d50, "tol 1e-7")
    const("kBatchLbQmDtc200", d200, "tol 1e-7")
    const("kBatchLbDualWitness", witness, "explicit-s certificate value")
    const("kBatchLbVshapeEQ", e_q, "E[S_1/2] under collapsed marginal")
    const("kBatchLbVshapeEB", e_b, "E[S_1/2] under calibrated reference")
    const("kBatchLbWitnessGap", gap, "= sqrt(eps)/2")
    const("kBatchLbDlCollapsed", dl_collapsed,
          "LP max = sqrt(eps)/2 + eps/2 - eps^1.5; tol 1e-6")
    emit()

    # ---- online pair joints, eps = 0.04, T = 100 ----
    t_pair, eps = 100, 0.04
    r = math.sqrt(eps)
    def snap_int(x):
        assert abs(x - round(x)) <= 1e-9, x
        return int(round(x))

    ones1 = snap_int(t_pair * (0.5 - r / 2 + eps))
    ones2 = snap_int(t_pair * (0.5 + r / 2 - eps))
    ones_s2 = snap_int(2 * t_pair * (0.5 - r - eps))
    assert ones1 == 44 and ones2 == 56 and ones_s2 == 52
    seq1 = Joint([0.3, 0.7], [44.0, 56.0], [56.0, 44.0])
    seq2 = Joint([0.3], [52.0], [148.0])
    d1 = dtc_primal(seq1, 200)
    d2 = dtc_primal(seq2, 200)
    assert abs(d1 - eps) < 1e-9 and abs(d2 - eps) < 1e-9, (d1, d2)
    cv1, cmu1 = cdl_vshape(seq1)
    cv2, cmu2 = cdl_vshape(seq2)
    assert abs(cv1 - 0.1) < 1e-12 and abs(cmu1 - 0.3) < 1e-12
    assert abs(cv2 - 0.02 / 0.72) < 1e-12
    emit("// Online adversarial pair at eps = 0.04, T = 100 (sequences of 2T).")
    const("kOnlineSeq1Dtc200", d1, "tol 1e-7")
    const("kOnlineSeq2Dtc200", d2, "tol 1e-7")
    const("kOnlineSeq1Ece", seq1.ece(), "identity post-processor, exact")
    const("kOnlineSeq2Ece", seq2.ece(), "identity post-processor, exact")
    const("kOnlineSeq1CdlVshape", cv1, "mu = 0.3")
    const("kOnlineSeq2CdlVshape", cv2, "mu = 0.28")

    # Deterministic post-processors on the pair: analytic means.
    post_map = {0.3: 0.44, 0.7: 0.56}
    pm1 = Joint([0.44, 0.56], [44.0, 56.0], [56.0, 44.0])
    pm2 = Joint([0.44], [52.0], [148.0])
    assert abs(pm1.ece() - 0.0) < 1e-15
    assert abs(pm2.ece() - 0.18) < 1e-15
    pv2, pmu2 = cdl_vshape(pm2)
    assert abs(pv2 - 0.09 / 0.65) < 1e-12 and abs(pmu2 - 0.35) < 1e-12
    const("kOnlinePostMapEce2", pm2.ece(), "posterior-map on sequence 2")
    const("kOnlinePostMapCdl2", pv2, "mu = 0.35")
    worst = 1.0
    for c in [i * 0.05 for i in range(21)]:
        jc1 = Joint([c], [100.0], [100.0])
        jc2 = Joint([c], [52.0], [148.0])
        m_ece = max(jc1.ece(), jc2.ece())
        m_cdl = max(cdl_vshape(jc1)[0], cdl_vshape(jc2)[0])
        worst = min(worst, min(m_ece, m_cdl))
    assert worst >= 0.045, worst
    const("kOnlineConstGridWorst", worst,
          "min over constant grid (step 0.05) of max-of-means, both metrics")
    emit()

    # ---- noise constants ----
    emit("// Truncated-Laplace / truncated-Gaussian reference numbers.")
    lap1 = TruncLaplace(math.exp(-1.0))
    const("kLapDensityE1Center", lap1.pdf(0.5, 0.5),
          "tau=e^-1, q=p=0.5: 1/(2-2e^-0.5); tol 1e-12")
    for e in eps_grid:
        lap = laplace_for_budget(e)
        closed0 = -1.0 / math.log(lap.tau) - lap.tau / (1.0 - lap.tau)
        m = lap.max_e_abs()
        assert abs(m - closed0) < 1e-12, (e, m, closed0)  # max attained at q in {0,1}
        const(f"kLapEAbs{_tag(e)}", m,
              f"max_q E|M(q)-q|, laplace eps={e}; tol 1e-9")
    for e in eps_grid:
        gl = gauss_for_budget(e, "lemma")
        gi = gauss_for_budget(e, "improved")
        const(f"kGaussLemmaSigma{_tag(e)}", gl.sigma, f"eps={e}")
        const(f"kGaussLemmaEAbs{_tag(e)}", gl.max_e_abs(), "tol 1e-6")
        const(f"kGaussImpEAbs{_tag(e)}", gi.max_e_abs(),
              f"sigma=sqrt({e}); tol 1e-6")
    emit()

    # Spot TV distances (quadrature to 1e-12).
    const("kTvLapE2", tv_distance(TruncLaplace(math.exp(-2.0)), 0.2, 0.5),
          "tau=e^-2, b=0.2, q=0.5; tol 1e-7")
    const("kTvGauss02", tv_distance(TruncGauss(0.2), 0.2, 0.5),
          "sigma=0.2, b=0.2, q=0.5; tol 1e-7")
    emit()

    # Laplace exhaustive DP grid check (densities on the 0.01 grid).
    for tau, name in [(math.exp(-1.0), "E1"),
                      (laplace_for_budget(0.01).tau, "Eps001")]:
        lap = TruncLaplace(tau)
        gamma = -2.0 * math.log(tau)
        qs = np.arange(0.0, 1.0 + 5e-3, 0.01)
        f = np.array([[lap.pdf(q, p) for p in qs] for q in qs])
        worst_v = -np.inf
        for i, q in enumerate(qs):
            ratio = np.exp(gamma * np.abs(q - qs))[:, None] * f
            worst_v = max(worst_v, float(np.max(f[i][None, :] - ratio)))
        assert worst_v <= 1e-9, (name, worst_v)
    emit("// Gaussian violation-event tail masses, max over 0.01-grid pairs")
    emit("// (q,q'), event {p : log density ratio > gamma_eff |q-q'|} with")
    emit("// gamma_eff = -ln(1 - min(2 sqrt(eps), 1)) / eps.  The <= delta")
    emit("// guarantee is claimed (and holds) for the wide-sigma variant only;")
    emit("// the sqrt(eps)-sigma variant is covered by the TV-distance bound")
    emit("// instead and its tail mass is reported as a diagnostic.")

    def gauss_tail_mass(g, gamma):
        worst_t = 0.0
        qs = np.arange(0.0, 1.0 + 5e-3, 0.01)
        lnz = {float(q): math.log(g.z(q)) for q in qs}
        for q in qs:
            for qp in qs:
                if q == qp:
                    continue
                dlt = q - qp
                # log-ratio(p) = dlt*(2p - q - qp)/(2 sigma^2) + ln Zq'/Zq
                c0 = gamma * abs(dlt) - (lnz[float(qp)] - lnz[float(q)])
                p0 = (q + qp) / 2.0 + g.sigma ** 2 * c0 / dlt
                if dlt > 0:
                    if p0 >= 1.0:
                        continue
                    mass = g.cdf(q, 1.0) - g.cdf(q, max(p0, 0.0))
                else:
                    if p0 <= 0.0:
                        continue
                    mass = g.cdf(q, min(p0, 1.0))
                worst_t = max(worst_t, mass)
        return worst_t

    for e in (0.01, 0.04):
        delta = math.sqrt(e)
        t_lem = gauss_tail_mass(gauss_for_budget(e, "lemma"), gauss_gamma_eff(e))
        assert t_lem <= delta + 1e-6, (e, t_lem)
        const(f"kGaussTailLemma{_tag(e)}", t_lem,
              f"eps={e}; must stay <= sqrt(eps)+1e-6")
        t_imp = gauss_tail_mass(gauss_for_budget(e, "improved"),
                                gauss_gamma_eff(e))
        const(f"kGaussTailImproved{_tag(e)}", t_imp,
              f"eps={e}; diagnostic only, no DP claim for sigma=sqrt(eps)")
    # Pin the diagnostic magnitudes: the narrow sigma badly violates the
    # delta budget at eps=0.01 (almost all mass) while at eps=0.04 the worst
    # pair (q=0.24, q'=1) happens to stay inside delta = 0.2.
    assert gauss_tail_mass(gauss_for_budget(0.01, "improved"),
                           gauss_gamma_eff(0.01)) > 0.9
    t_imp_004 = gauss_tail_mass(gauss_for_budget(0.04, "improved"),
                                gauss_gamma_eff(0.04))
    assert 0.05 < t_imp_004 < 0.2, t_imp_004
    emit()

    # ---- theorem-side bounds ----
    emit("// Composed batch bounds: 2*maxEAbs + 4*(1 - e^{-gamma eps} + delta),")
    emit("// improved Gaussian path: sigma + 8 eps / sigma.")
    for e in eps_grid:
        lap = laplace_for_budget(e)
        gamma = -2.0 * math.log(lap.tau)
        bound = 2.0 * lap.max_e_abs() + 4.0 * (1.0 - math.exp(-gamma * e))
        const(f"kBoundLap{_tag(e)}", bound, "tol 1e-6")
        gi = gauss_for_budget(e, "improved")
        const(f"kBoundGaussImp{_tag(e)}", gi.sigma + 8.0 * e / gi.sigma,
              "tol 1e-9")
        gb = 2.0 * gauss_for_budget(e, "lemma").max_e_abs() + \
            4.0 * (min(2.0 * math.sqrt(e), 1.0) + math.sqrt(e))
        const(f"kBoundGaussLemma{_tag(e)}", gb, "tol 1e-6")
    b001 = 2.0 * laplace_for_budget(0.01).max_e_abs() + \
        4.0 * (1.0 - math.exp(-(-2.0 * math.log(laplace_for_budget(0.01).tau)) * 0.01))
    assert abs(b001 - 0.8087) < 5e-4, b001
    emit()

    # ---- batch sweep: analytic pushforward ece and decision loss ----
    emit("// Analytic batch sweep on the adversarial instance (ece at bins=1000,")
    emit("// decision loss of the mechanism-extended coupling at bins=200).")
    slopes = {}
    for mech_name, mk in [("Lap", lambda e: laplace_for_budget(e)),
                          ("GaussImp", lambda e: gauss_for_budget(e, "improved"))]:
        eces = []
        for e in eps_grid:
            mech = mk(e)
            inst = batch_lb_atoms(e)
            qm_e = q_marginal(inst)
            pf = pushforward(mech, qm_e, 1000)
            eces.append(pf.ece())
            const(f"kSweepEce{mech_name}{_tag(e)}", pf.ece(),
                  "pushforward ece; tol 1e-7")
        lx, ly = np.log(eps_grid), np.log(eces)
        slope = float(np.polyfit(lx, ly, 1)[0])
        slopes[mech_name] = slope
        const(f"kSweepSlope{mech_name}", slope, "log-log OLS slope of ece vs eps")
    # Pin the measured scaling: the sqrt(eps)-sigma Gaussian tracks the
    # asymptotic 1/2 slope across the sweep; the Laplace saturates at the
    # large-eps end (E|X| ~ 0.25 at eps=0.04) and lands below 0.4.
    assert 0.30 <= slopes["Lap"] <= 0.40, slopes
    assert 0.45 <= slopes["GaussImp"] <= 0.55, slopes
    for mech_name, mk in [("Lap", lambda e: laplace_for_budget(e)),
                          ("GaussImp", lambda e: gauss_for_budget(e, "improved"))]:
        for e in (0.01, 0.04):
            mech = mk(e)
            ext = pushforward_coupling(mech, batch_lb_atoms(e), 200)
            dl = decision_loss(ext)
            const(f"kSweepDl{mech_name}{_tag(e)}", dl,
                  "extended-coupling decision loss; tol 1e-6")
    emit()

    # ---- two-point joint through Gaussian sigma=0.1 (bins=1000) ----
    g01 = TruncGauss(0.1)
    pf_t1 = pushforward(g01, t1, 1000)
    const("kTwoPointGauss01Ece", pf_t1.ece(),
          "pushforward of the two-point joint, sigma=0.1, bins=1000; tol 1e-7")
    emit()

    # ---- online upper-bound composition at eps=0.04, T=1000 rounds ----
    lap04 = laplace_for_budget(0.04)
    gamma04 = -2.0 * math.log(lap04.tau)
    c7 = lap04.max_e_abs() + 4.0 * (1.0 - math.exp(-gamma04 * 0.04)) + \
        2.0 * 1000.0 ** (-1.0 / 3.0)
    const("kOnlineBoundLapEps004T1000", c7, "EAbs + 4(1-e^{-ge}) + 2 T^{-1/3}")
    emit()

    # ---- generic LP fixtures ----
    emit("// Generic LP fixtures (optimal objective values from HiGHS).")
    v, _ = lp_max([3.0, 2.0],
                  a_ub=[[1.0, 1.0], [1.0, 3.0]], b_ub=[4.0, 6.0],
                  bounds=[(0.0, None)] * 2)
    assert abs(v - 12.0) < 1e-9
    const("kLpSimple2dValue", v, "max 3x+2y, x+y<=4, x+3y<=6, x,y>=0")
    v, _ = lp_max([1.0, 2.0, 3.0],
                  a_ub=[[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]], b_ub=[0.2, 0.5],
                  a_eq=[[1.0, 1.0, 1.0]], b_eq=[1.0],
                  bounds=[(0.0, None)] * 3)
    const("kLpMixedValue", v,
          "max x+2y+3z, x+y+z=1, x-y<=0.2, z<=0.5, vars >= 0")
    v, _ = lp_max([1.0, -1.0],
                  a_ub=[[1.0, -1.0]], b_ub=[2.0],
                  bounds=[(None, 1.0), (-3.0, None)])
    assert abs(v - 2.0) < 1e-9
    const("kLpFreeVarValue", v, "max x-y, x-y<=2, x<=1, y>=-3")
    v, _ = lp_max([2.0, 1.0],
                  a_ub=[[1.0, 1.0]], b_ub=[1.0],
                  bounds=[(-1.0, 2.0), (-2.0, 1.0)])
    assert abs(v - 3.0) < 1e-9
    const("kLpNegBoundsValue", v, "max 2x+y, x+y<=1, x in [-1,2], y in [-2,1]")

    rng = np.random.default_rng(20260823)
    n_eq, n_le, nv = 12, 8, 30
    a_eq = np.round(rng.uniform(-1.0, 1.0, size=(n_eq, nv)), 3)
    a_le = np.round(rng.uniform(-1.0, 1.0, size=(n_le, nv)), 3)
    x0 = np.round(rng.uniform(0.0, 1.0, size=nv), 3)
    b_eq = a_eq @ x0
    b_le = a_le @ x0 + np.round(rng.uniform(0.0, 0.5, size=n_le), 3)
    c = np.round(rng.uniform(-1.0, 1.0, size=nv), 3)
    v, _ = lp_max(c, a_ub=a_le, b_ub=b_le, a_eq=a_eq, b_eq=b_eq,
                  bounds=[(0.0, 10.0)] * nv)
    emit("// Random dense LP (30 vars, 12 eq + 8 le rows, bounds [0,10]);")
    emit("// b vectors chosen so x0 (uniform [0,1]) is feasible.")
    const("kLpDenseValue", v, "tol 1e-6")
    emit(f"inline constexpr int kLpDenseEqRows = {n_eq};")
    emit(f"inline constexpr int kLpDenseLeRows = {n_le};")
    emit(f"inline constexpr int kLpDenseVars = {nv};")
    const_arr("kLpDenseAeq", a_eq.ravel(), "row-major 12x30")
    const_arr("kLpDenseBeq", b_eq)
    const_arr("kLpDenseAle", a_le.ravel(), "row-major 8x30")
    const_arr("kLpDenseBle", b_le)
    const_arr("kLpDenseC", c)
    emit()

    # ---- mini property sweeps (oracle-side assurance only) ----
    rng = np.random.default_rng(7)
    for trial in range(60):
        k = int(rng.integers(1, 9))
        vals = np.sort(rng.uniform(0.0, 1.0, size=k))
        if len(np.unique(vals)) < k:
            continue
        posts = rng.uniform(0.0, 1.0, size=k)
        ws = rng.uniform(0.05, 1.0, size=k)
        j = joint_from_posteriors(vals, posts, ws)
        e = j.ece()
        s = smooth_cal(j)
        d = dtc_primal(j, 200)
        assert 0.5 * d - 1.0 / 200 <= s + 1e-9, (trial, s, d)
        assert s <= 2.0 * d + 1e-7, (trial, s, d)
        c_lp = cdl_lp(j)
        c_vs, _ = cdl_vshape(j)
        assert c_vs <= c_lp + 1e-9 <= 2.0 * e + 2e-9, (trial, c_vs, c_lp, e)
        if k <= 3:
            assert abs(c_lp - cdl_lp(j, full=True)) < 1e-8

    emit("}  // namespace dcal::expected")
    print("\n".join(OUT))
    print(f"// oracle internal checks passed; slopes: {slopes}", file=sys.stderr)


def _tag(e):
    return {0.0025: "Eps00025", 0.005: "Eps0005", 0.01: "Eps001",
            0.02: "Eps002", 0.04: "Eps004"}[e]


if __name__ == "__main__":
    run()
