"""Pointwise material models.

Two laws are provided, both with temperature-dependent coefficients given as
piecewise-linear tables (clamped outside the tabulated range):

* cubic elasticity with isotropic thermal expansion,
  sigma = A(T) : (eps - eps_th), eps_th = alpha(T) (T - T0) I;
* elastoviscoplasticity: Norton flow with nonlinear kinematic hardening and
  constant isotropic hardening on top of the cubic elastic part,
  sigma = A : (eps - eps_th - eps_p).

Conventions. Symmetric 3x3 tensors are stored as length-6 Voigt vectors in
the order (11, 22, 33, 23, 13, 12). Strain-like vectors carry engineering
shear (gamma = 2 eps_ij); stress-like vectors and the stored plastic strain
carry plain tensor components. The 6x6 stiffness acts on engineering strain.

All evaluation routines are vectorized over a leading point axis and never
mutate their inputs; they are safe to call concurrently.
"""

import re

import numpy as np

from .errors import NumericalError, ValidationError

#: Frobenius metric for tensor-Voigt vectors: a:b = sum(W * a * b).
VOIGT_WEIGHT = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])
#: Second-order identity in Voigt form.
VOIGT_ID = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])

_DEFAULT_T0 = 20.0


def strain_to_tensor(strain):
    """Convert engineering-shear strain vectors to tensor components."""
    out = np.array(strain, dtype=float, copy=True)
    out[..., 3:] *= 0.5
    return out


def tensor_to_strain(tensor):
    """Convert tensor-component vectors to engineering-shear strain form."""
    out = np.array(tensor, dtype=float, copy=True)
    out[..., 3:] *= 2.0
    return out


def deviator(voigt):
    """Deviatoric part of a tensor-Voigt (or stress-Voigt) vector."""
    out = np.array(voigt, dtype=float, copy=True)
    mean = out[..., :3].sum(axis=-1) / 3.0
    out[..., :3] -= mean[..., None]
    return out


def eq_norm(tensor_voigt):
    """von Mises-type norm sqrt(3/2) ||t|| of a tensor-Voigt vector."""
    sq = (tensor_voigt**2 * VOIGT_WEIGHT).sum(axis=-1)
    return np.sqrt(1.5 * sq)


class TemperatureTable:
    """Piecewise-linear coefficient table in temperature, clamped at both ends."""

    def __init__(self, temperatures, values):
        T = np.atleast_1d(np.asarray(temperatures, dtype=float))
        v = np.atleast_1d(np.asarray(values, dtype=float))
        if T.size == 0 or T.shape != v.shape:
            raise ValidationError("temperature table needs matching, nonempty T/value arrays")
        if T.size > 1 and not np.all(np.diff(T) > 0.0):
            raise ValidationError("temperature table must be strictly increasing in T")
        self.temperatures = T
        self.values = v

    @classmethod
    def constant(cls, value):
        return cls([_DEFAULT_T0], [value])

    def __call__(self, T):
        return np.interp(T, self.temperatures, self.values)

    def format_entry(self):
        return " ".join(f"{t:.10g}:{v:.17g}" for t, v in zip(self.temperatures, self.values))


def _as_table(obj):
    if isinstance(obj, TemperatureTable):
        return obj
    if np.isscalar(obj):
        return TemperatureTable.constant(float(obj))
    return TemperatureTable(*obj)


class ElasParams:
    """Cubic elastic coefficients y1111, y1122, y1212 (MPa) and expansion alpha (1/K).

    The Voigt stiffness built from the tables must be positive definite at
    every tabulated temperature; this is checked at construction using the
    closed-form eigenvalues of the cubic matrix (y1111 + 2 y1122, y1111 -
    y1122, y1212).
    """

    def __init__(self, y1111, y1122, y1212, alpha, t_ref=_DEFAULT_T0):
        self.y1111 = _as_table(y1111)
        self.y1122 = _as_table(y1122)
        self.y1212 = _as_table(y1212)
        self.alpha = _as_table(alpha)
        self.t_ref = float(t_ref)
        self._check_definite()

    def tabulated_temperatures(self):
        grids = [t.temperatures for t in (self.y1111, self.y1122, self.y1212, self.alpha)]
        return np.unique(np.concatenate(grids))

    def _check_definite(self):
        for T in self.tabulated_temperatures():
            y11, y12, y44 = self.y1111(T), self.y1122(T), self.y1212(T)
            if y11 + 2 * y12 <= 0 or y11 - y12 <= 0 or y44 <= 0:
                raise ValidationError(
                    f"elastic stiffness not positive definite at T={T:g} "
                    f"(y1111={y11:g}, y1122={y12:g}, y1212={y44:g})"
                )

    def coefficients(self, T):
        return self.y1111(T), self.y1122(T), self.y1212(T)

    def stiffness(self, T):
        """Voigt stiffness matrix A(T), shape (..., 6, 6)."""
        y11, y12, y44 = (np.asarray(c, dtype=float) for c in self.coefficients(T))
        shape = y11.shape + (6, 6)
        A = np.zeros(shape)
        for i in range(3):
            for j in range(3):
                A[..., i, j] = y11 if i == j else y12
        for i in range(3, 6):
            A[..., i, i] = y44
        return A

    def thermal_strain(self, T):
        """Isotropic thermal strain alpha(T)(T - T0) I, engineering Voigt."""
        a = np.asarray(self.alpha(T), dtype=float) * (np.asarray(T, dtype=float) - self.t_ref)
        return a[..., None] * VOIGT_ID


class EvpParams:
    """Norton-flow viscoplasticity coefficients on top of an elastic part.

    C (MPa) and D (dimensionless recall) govern the kinematic hardening,
    K (MPa) and m the Norton flow, R0 (MPa) the constant isotropic hardening.
    K > 0, m >= 1 and R0 >= 0 are enforced at every tabulated temperature.
    """

    def __init__(self, elastic, C, D, K, m, R0):
        self.elastic = elastic
        self.C = _as_table(C)
        self.D = _as_table(D)
        self.K = _as_table(K)
        self.m = _as_table(m)
        self.R0 = _as_table(R0)
        grids = [t.temperatures for t in (self.C, self.D, self.K, self.m, self.R0)]
        for T in np.unique(np.concatenate(grids)):
            if self.K(T) <= 0:
                raise ValidationError(f"Norton coefficient K must be > 0 (T={T:g})")
            if self.m(T) < 1:
                raise ValidationError(f"Norton exponent m must be >= 1 (T={T:g})")
            if self.R0(T) < 0:
                raise ValidationError(f"isotropic hardening R0 must be >= 0 (T={T:g})")


class MaterialState:
    """Internal variables at a set of points: plastic strain and cumulated plasticity.

    ``eps_p`` has shape (n, 6) and stores tensor components (no engineering
    doubling); ``p`` has shape (n,) and is nondecreasing across updates.
    """

    __slots__ = ("eps_p", "p")

    def __init__(self, eps_p, p):
        self.eps_p = np.asarray(eps_p, dtype=float)
        self.p = np.asarray(p, dtype=float)

    @classmethod
    def virgin(cls, n_points):
        return cls(np.zeros((n_points, 6)), np.zeros(n_points))

    def copy(self):
        return MaterialState(self.eps_p.copy(), self.p.copy())

    def __len__(self):
        return self.p.shape[0]


class LawResponse:
    """Stress, consistent tangent and updated state returned by a law evaluation."""

    __slots__ = ("stress", "tangent", "state")

    def __init__(self, stress, tangent, state):
        self.stress = stress
        self.tangent = tangent
        self.state = state


def _cubic_stress(y11, y12, y44, strain):
    """A(T) : eps for engineering-Voigt strain, cubic symmetry."""
    y11 = np.asarray(y11, dtype=float)
    y12 = np.asarray(y12, dtype=float)
    y44 = np.asarray(y44, dtype=float)
    tr = strain[..., :3].sum(axis=-1)
    sig = np.empty_like(strain)
    sig[..., :3] = (y11 - y12)[..., None] * strain[..., :3] + (y12 * tr)[..., None]
    sig[..., 3:] = y44[..., None] * strain[..., 3:]
    return sig


def _broadcast_T(temperature, n):
    T = np.asarray(temperature, dtype=float)
    if T.ndim == 0:
        return np.full(n, float(T))
    if T.shape != (n,):
        raise ValidationError(f"temperature array has shape {T.shape}, expected ({n},)")
    return T


class ElasticLaw:
    """Temperature-dependent cubic elasticity with thermal expansion (stateless)."""

    has_internal_state = False

    def __init__(self, params):
        self.params = params

    def evaluate(self, strain, temperature, dt=0.0, state=None):
        strain = np.asarray(strain, dtype=float)
        n = strain.shape[0]
        if strain.shape != (n, 6):
            raise ValidationError(f"strain array has shape {strain.shape}, expected (n, 6)")
        T = _broadcast_T(temperature, n)
        y11, y12, y44 = self.params.coefficients(T)
        eff = strain - self.params.thermal_strain(T)
        if state is not None and state.eps_p.shape == (n, 6):
            eff = eff - tensor_to_strain(state.eps_p)
        stress = _cubic_stress(y11, y12, y44, eff)
        tangent = self.params.stiffness(T)
        out_state = state if state is not None else MaterialState.virgin(n)
        return LawResponse(stress, tangent, out_state)


# Constant 6x6 projectors on tensor-Voigt vectors: trace, diagonal-deviatoric
# and off-diagonal parts. The cubic stiffness acts as a scalar on each.
_P_TRACE = np.zeros((6, 6))
_P_TRACE[:3, :3] = 1.0 / 3.0
_P_DIAG = np.zeros((6, 6))
_P_DIAG[:3, :3] = np.eye(3) - 1.0 / 3.0
_P_OFF = np.diag([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
_P_DEV = np.eye(6) - _P_TRACE
_DW = np.diag(VOIGT_WEIGHT)


class ViscoplasticLaw:
    """Backward-Euler update of the Norton-flow law with kinematic recall.

    The discrete update on (eps_p, p) reduces to one scalar consistency
    equation on the plasticity increment dp: given dp, the flow rule is a
    linear map that is diagonal on the trace / diagonal-deviatoric /
    off-diagonal subspaces of the plastic strain, so the new stress deviator
    is closed form. A safeguarded scalar Newton (bisection fallback) solves
    the consistency residual to ``newton_tol`` (relative to the trial
    equivalent stress), in at most ``newton_max_iter`` iterations.
    """

    has_internal_state = True

    def __init__(self, params, newton_tol=1e-12, newton_max_iter=50):
        self.params = params
        self.newton_tol = newton_tol
        self.newton_max_iter = newton_max_iter

    # -- scalar consistency equation ---------------------------------------

    @staticmethod
    def _channels(dp, dt, coef, S0d, S0o, told_d, told_o, told_c):
        """Stress deviator channels s_d, s_o, s_tr and q(dp) for increments dp."""
        C, D, K, m, R0, m_d, m_o = coef
        q = R0 + K * (dp / dt) ** (1.0 / m)
        xi = dp / q
        al = 1.0 + D * dp
        den_d = al + 1.5 * xi * m_d
        den_o = al + 1.5 * xi * m_o
        den_t = al + 1.5 * xi * C
        sd = (al[:, None] * S0d - m_d[:, None] * told_d) / den_d[:, None]
        so = (al[:, None] * S0o - m_o[:, None] * told_o) / den_o[:, None]
        st = -C * told_c / den_t
        seq = np.sqrt(1.5 * ((sd**2).sum(1) + 2.0 * (so**2).sum(1) + 3.0 * st**2))
        return q, xi, al, (den_d, den_o, den_t), sd, so, st, seq

    def _solve_increment(self, dt, coef, S0d, S0o, told_d, told_o, told_c, f_trial, seq_trial):
        """Solve the consistency equation; returns converged dp > 0 per point."""
        C, D, K, m, R0, m_d, m_o = coef
        n = f_trial.shape[0]
        tol = self.newton_tol * np.maximum(1.0, seq_trial)

        def residual(dp):
            q, xi, al, dens, sd, so, st, seq = self._channels(
                dp, dt, coef, S0d, S0o, told_d, told_o, told_c
            )
            return seq - q

        # Bracket: R(0+) = f_trial > 0; grow hi until R(hi) < 0.
        x0 = dt * (f_trial / K) ** m
        hi = np.maximum(x0, 1e-12 * dt)
        for _ in range(200):
            mask = residual(hi) >= 0.0
            if not mask.any():
                break
            hi[mask] *= 2.0
        else:
            raise NumericalError("viscoplastic update: failed to bracket the plastic increment")
        lo = np.zeros(n)
        x = 0.5 * hi

        converged = np.zeros(n, dtype=bool)
        for _ in range(self.newton_max_iter):
            q, xi, al, (den_d, den_o, den_t), sd, so, st, seq = self._channels(
                x, dt, coef, S0d, S0o, told_d, told_o, told_c
            )
            R = seq - q
            converged = np.abs(R) <= tol
            if converged.all():
                break
            qp = (K / (m * dt)) * (x / dt) ** (1.0 / m - 1.0)
            xip = (q - x * qp) / q**2
            sdp = (D[:, None] * S0d - sd * (D + 1.5 * xip * m_d)[:, None]) / den_d[:, None]
            sop = (D[:, None] * S0o - so * (D + 1.5 * xip * m_o)[:, None]) / den_o[:, None]
            stp = -st * (D + 1.5 * xip * C) / den_t
            dseq = 1.5 * ((sd * sdp).sum(1) + 2.0 * (so * sop).sum(1) + 3.0 * st * stp) / seq
            Rp = dseq - qp

            pos = R > 0.0
            lo = np.where(pos & ~converged, x, lo)
            hi = np.where(~pos & ~converged, x, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                xn = x - R / Rp
            bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
            xn = np.where(bad, 0.5 * (lo + hi), xn)
            x = np.where(converged, x, xn)
        if not converged.all():
            idx = np.flatnonzero(~converged)
            raise NumericalError(
                f"viscoplastic update did not converge at {idx.size} point(s), "
                f"first indices {idx[:5].tolist()}, max |residual| "
                f"{float(np.abs(residual(x)[idx]).max()):.3e}"
            )
        return x

    # -- public evaluation ---------------------------------------------------

    def evaluate(self, strain, temperature, dt, state):
        """One backward-Euler step from ``state`` to total strain ``strain``."""
        strain = np.asarray(strain, dtype=float)
        n = strain.shape[0]
        if strain.shape != (n, 6):
            raise ValidationError(f"strain array has shape {strain.shape}, expected (n, 6)")
        if dt <= 0.0:
            raise ValidationError("viscoplastic update requires dt > 0")
        if state is None or len(state) != n:
            raise ValidationError("viscoplastic update requires a state of matching size")
        T = _broadcast_T(temperature, n)

        el = self.params.elastic
        y11, y12, y44 = (np.asarray(c, dtype=float) for c in el.coefficients(T))
        C = np.asarray(self.params.C(T), dtype=float)
        D = np.asarray(self.params.D(T), dtype=float)
        K = np.asarray(self.params.K(T), dtype=float)
        m = np.asarray(self.params.m(T), dtype=float)
        R0 = np.asarray(self.params.R0(T), dtype=float)
        m_d = y11 - y12 + C
        m_o = 2.0 * y44 + C
        coef = (C, D, K, m, R0, m_d, m_o)

        t_old = state.eps_p
        e0 = strain - el.thermal_strain(T)
        S0 = deviator(_cubic_stress(y11, y12, y44, e0))
        S0d, S0o = S0[:, :3], S0[:, 3:]
        told_c = t_old[:, :3].sum(1) / 3.0
        told_d = t_old[:, :3] - told_c[:, None]
        told_o = t_old[:, 3:]

        # Trial state (dp = 0): s = S0 - dev(A:eps_p) - C eps_p.
        s_trial_d = S0d - m_d[:, None] * told_d
        s_trial_o = S0o - m_o[:, None] * told_o
        s_trial_t = -C * told_c
        seq_trial = np.sqrt(
            1.5 * ((s_trial_d**2).sum(1) + 2.0 * (s_trial_o**2).sum(1) + 3.0 * s_trial_t**2)
        )
        f_trial = seq_trial - R0
        plastic = f_trial > 0.0

        stress = _cubic_stress(y11, y12, y44, e0 - tensor_to_strain(t_old))
        tangent = el.stiffness(T)
        eps_p_new = t_old.copy()
        p_new = state.p.copy()

        if plastic.any():
            idx = np.flatnonzero(plastic)
            sub = lambda a: a[idx]
            coef_p = tuple(c[idx] for c in coef)
            dp = self._solve_increment(
                dt, coef_p, sub(S0d), sub(S0o), sub(told_d), sub(told_o), sub(told_c),
                sub(f_trial), sub(seq_trial),
            )
            q, xi, al, dens, sd, so, st, seq = self._channels(
                dp, dt, coef_p, sub(S0d), sub(S0o), sub(told_d), sub(told_o), sub(told_c)
            )
            den_d, den_o, den_t = dens
            Cp, Dp, Kp, mp, R0p, m_dp, m_op = coef_p
            t_d = (sub(told_d) + 1.5 * xi[:, None] * sub(S0d)) / den_d[:, None]
            t_o = (sub(told_o) + 1.5 * xi[:, None] * sub(S0o)) / den_o[:, None]
            t_c = sub(told_c) / den_t
            t_new = np.empty((idx.size, 6))
            t_new[:, :3] = t_d + t_c[:, None]
            t_new[:, 3:] = t_o
            eps_p_new[idx] = t_new
            p_new[idx] = state.p[idx] + dp
            stress[idx] = _cubic_stress(
                sub(y11), sub(y12), sub(y44), sub(e0) - tensor_to_strain(t_new)
            )
            tangent[idx] = self._consistent_tangent(
                dp, dt, coef_p, tangent[idx], sub(S0d), sub(S0o),
                q, xi, al, dens, sd, so, st, seq, t_d, t_o, t_c,
            )
        return LawResponse(stress, tangent, MaterialState(eps_p_new, p_new))

    def _consistent_tangent(self, dp, dt, coef, A, S0d, S0o,
                            q, xi, al, dens, sd, so, st, seq, t_d, t_o, t_c):
        """Algorithmically consistent linearization d sigma / d eps at the root."""
        C, D, K, m, R0, m_d, m_o = coef
        den_d, den_o, den_t = dens
        PdevA = np.einsum("ab,nbc->nac", _P_DEV, A)

        qp = (K / (m * dt)) * (dp / dt) ** (1.0 / m - 1.0)
        xip = (q - dp * qp) / q**2
        sdp = (D[:, None] * S0d - sd * (D + 1.5 * xip * m_d)[:, None]) / den_d[:, None]
        sop = (D[:, None] * S0o - so * (D + 1.5 * xip * m_o)[:, None]) / den_o[:, None]
        stp = -st * (D + 1.5 * xip * C) / den_t
        dseq_ddp = 1.5 * ((sd * sdp).sum(1) + 2.0 * (so * sop).sum(1) + 3.0 * st * stp) / seq
        Rp = dseq_ddp - qp

        # d s_eq / d eps at fixed dp, via the per-subspace factors alpha/den.
        svec = np.zeros((dp.shape[0], 6))
        svec[:, :3] = sd / den_d[:, None] + (st / den_t)[:, None]
        svec[:, 3:] = so / den_o[:, None]
        g = (1.5 * al / seq)[:, None] * np.einsum(
            "nb,nbc->nc", svec * VOIGT_WEIGHT, PdevA
        )
        ddp_de = -g / Rp[:, None]

        # dt/deps = (d t / d S0) dS0/deps + (d t / d dp) x (d dp / d eps).
        fac = 1.5 * xi
        B1 = (
            np.einsum("ab,nbc->nac", _P_DIAG, PdevA) * (fac / den_d)[:, None, None]
            + np.einsum("ab,nbc->nac", _P_OFF, PdevA) * (fac / den_o)[:, None, None]
            + np.einsum("ab,nbc->nac", _P_TRACE, PdevA) * (fac / den_t)[:, None, None]
        )
        t_dp = np.zeros((dp.shape[0], 6))
        t_dp[:, :3] = (
            (1.5 * xip[:, None] * S0d - t_d * (D + 1.5 * xip * m_d)[:, None]) / den_d[:, None]
            - (t_c * (D + 1.5 * xip * C) / den_t)[:, None]
        )
        t_dp[:, 3:] = (1.5 * xip[:, None] * S0o - t_o * (D + 1.5 * xip * m_o)[:, None]) / den_o[:, None]
        dt_de = B1 + t_dp[:, :, None] * ddp_de[:, None, :]

        return A - np.einsum("nab,nbc->nac", A, VOIGT_WEIGHT[None, :, None] * dt_de)


def evaluate_elas(params, strain, temperature):
    """Single-point elastic evaluation; ``strain`` is a length-6 engineering vector."""
    law = ElasticLaw(params)
    r = law.evaluate(np.asarray(strain, dtype=float)[None, :], temperature)
    return LawResponse(r.stress[0], r.tangent[0], r.state)


def evaluate_evp(params, state, strain, temperature, dt):
    """Single-point viscoplastic backward-Euler update."""
    law = ViscoplasticLaw(params)
    r = law.evaluate(np.asarray(strain, dtype=float)[None, :], temperature, dt, state)
    return LawResponse(r.stress[0], r.tangent[0], r.state)


# -- HRMAT v1 ----------------------------------------------------------------

_ELAS_COEFS = ("y1111", "y1122", "y1212", "alpha")
_EVP_COEFS = ("C", "D", "K", "m", "R0")
_PAIR_RE = re.compile(r"^([^:\s]+):([^:\s]+)$")


def _parse_table(tokens, path, name):
    temps, vals = [], []
    for tok in tokens:
        match = _PAIR_RE.match(tok)
        if not match:
            raise ValidationError(f"{path}: malformed table entry '{tok}' for '{name}'")
        temps.append(float(match.group(1)))
        vals.append(float(match.group(2)))
    order = np.argsort(temps)
    return TemperatureTable(np.asarray(temps)[order], np.asarray(vals)[order])


def load_material(path):
    """Read an HRMAT v1 file; returns an ElasticLaw or a ViscoplasticLaw."""
    path = str(path)
    lines = []
    with open(path, encoding="ascii") as f:
        for raw in f:
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append(line)
    if not lines or lines[0].split() != ["HRMAT", "1"]:
        raise ValidationError(f"{path}: missing 'HRMAT 1' header")
    sections = {}
    current = None
    for line in lines[1:]:
        if line.startswith("["):
            name = line.strip("[]").strip()
            if name not in ("elas", "evp"):
                raise ValidationError(f"{path}: unknown section '[{name}]'")
            current = sections.setdefault(name, {})
            continue
        if current is None:
            raise ValidationError(f"{path}: coefficient line outside any section: '{line}'")
        tokens = line.split()
        current[tokens[0]] = _parse_table(tokens[1:], path, tokens[0])

    if "elas" not in sections:
        raise ValidationError(f"{path}: missing [elas] section")
    elas_sec = sections["elas"]
    t_ref = _DEFAULT_T0
    if "t0" in elas_sec:
        t_ref = float(elas_sec.pop("t0").values[0])
    missing = [c for c in _ELAS_COEFS if c not in elas_sec]
    if missing:
        raise ValidationError(f"{path}: [elas] missing coefficients {missing}")
    unknown = [c for c in elas_sec if c not in _ELAS_COEFS]
    if unknown:
        raise ValidationError(f"{path}: [elas] has unknown coefficients {unknown}")
    elas = ElasParams(*(elas_sec[c] for c in _ELAS_COEFS), t_ref=t_ref)

    if "evp" not in sections:
        return ElasticLaw(elas)
    evp_sec = sections["evp"]
    missing = [c for c in _EVP_COEFS if c not in evp_sec]
    if missing:
        raise ValidationError(f"{path}: [evp] missing coefficients {missing}")
    unknown = [c for c in evp_sec if c not in _EVP_COEFS]
    if unknown:
        raise ValidationError(f"{path}: [evp] has unknown coefficients {unknown}")
    return ViscoplasticLaw(EvpParams(elas, *(evp_sec[c] for c in _EVP_COEFS)))


def save_material(law, path):
    """Write a law back to HRMAT v1 (inverse of :func:`load_material`)."""
    if isinstance(law, ViscoplasticLaw):
        elas, evp = law.params.elastic, law.params
    elif isinstance(law, ElasticLaw):
        elas, evp = law.params, None
    else:
        raise ValidationError(f"cannot serialize law of type {type(law).__name__}")
    lines = ["HRMAT 1", "[elas]"]
    if elas.t_ref != _DEFAULT_T0:
        lines.append(f"t0 {_DEFAULT_T0:.10g}:{elas.t_ref:.10g}")
    for name in _ELAS_COEFS:
        lines.append(f"{name} {getattr(elas, name).format_entry()}")
    if evp is not None:
        lines.append("[evp]")
        for name in _EVP_COEFS:
            lines.append(f"{name} {getattr(evp, name).format_entry()}")
    with open(path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")
