"""Run configuration and deterministic artifact generation.

Everything the CLI writes is produced here as text, with fixed float
formatting (17 significant digits) and fixed orderings, so identical
configs yield byte-identical artifacts.  Files are only written after a
whole command has succeeded.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .numrange import limit_range, numerical_range_k
from .operator import SPHERE, cluster_assign, hamiltonian, spectrum
from .polysphere import AmbientPolynomial, SpherePoint
from .pseudospec import (PseudospectrumGrid, cluster_quasimode,
                         concentrated_quasimode, grid_sigma_min, tube_mass)
from .radon import (GeodesicPoint, bracket_field, classify_locus,
                    radon_geodesic, radon_poly)
from .sphharm import fibonacci_sphere, sup_norm_estimate
from .svgplot import numrange_svg, pspec_svg


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


_TOP_KEYS = {"potential", "lmax", "window", "resolution", "eps_list",
             "k_list", "samples", "output_dir", "seed"}
_WINDOW_KEYS = {"re_min", "re_max", "im_min", "im_max"}
_RESOLUTION_KEYS = {"nx", "ny"}


@dataclass
class RunConfig:
    potential: AmbientPolynomial
    lmax: int
    window: tuple
    resolution: tuple
    eps_list: list
    k_list: list
    samples: int = 400
    output_dir: str = "out"
    seed: int = 0
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def trusted_band(self):
        return self.lmax - (self.potential.degree or 0)


def _default_window(V, lmax):
    degv = V.degree or 0
    k_mid = max(1, (lmax - degv) // 2)
    center = SPHERE.cluster_center(k_mid)
    half = 2.0 * k_mid + 1.0
    im_half = 0.75 + sup_norm_estimate(V)
    return (center - half, center + half, -im_half, im_half)


def parse_config(text):
    """Parse and validate a JSON run configuration.

    Unknown keys are rejected by name; numeric constraints (truncation at
    least the potential degree, positive eps, nonempty window) are
    enforced here so commands can assume a valid configuration.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config is not valid JSON (line {exc.lineno}, column {exc.colno}): "
            f"{exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    for key in doc:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    if "potential" not in doc:
        raise ConfigError("missing required key 'potential'")
    if "lmax" not in doc:
        raise ConfigError("missing required key 'lmax'")
    try:
        V = AmbientPolynomial.from_monomials(doc["potential"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field 'potential': {exc}") from None
    lmax = doc["lmax"]
    if not isinstance(lmax, int) or lmax < 0:
        raise ConfigError("field 'lmax': must be a nonnegative integer")
    degv = V.degree or 0
    if lmax < degv:
        raise ConfigError("lmax below potential degree")

    if "window" in doc:
        w = doc["window"]
        if not isinstance(w, dict):
            raise ConfigError("field 'window': must be an object")
        for key in w:
            if key not in _WINDOW_KEYS:
                raise ConfigError(f"unknown window key {key!r}")
        missing = _WINDOW_KEYS - set(w)
        if missing:
            raise ConfigError(f"window missing key {sorted(missing)[0]!r}")
        window = (float(w["re_min"]), float(w["re_max"]),
                  float(w["im_min"]), float(w["im_max"]))
        if not (window[1] > window[0] and window[3] > window[2]):
            raise ConfigError("window is empty")
    else:
        window = _default_window(V, lmax)

    if "resolution" in doc:
        r = doc["resolution"]
        if not isinstance(r, dict):
            raise ConfigError("field 'resolution': must be an object")
        for key in r:
            if key not in _RESOLUTION_KEYS:
                raise ConfigError(f"unknown resolution key {key!r}")
        try:
            resolution = (int(r["nx"]), int(r["ny"]))
        except KeyError as exc:
            raise ConfigError(f"resolution missing key {exc.args[0]!r}") from None
        if resolution[0] < 2 or resolution[1] < 2:
            raise ConfigError("resolution must be at least 2 x 2")
    else:
        resolution = (96, 64)

    eps_list = doc.get("eps_list", [1e-1, 1e-2, 1e-3])
    if not isinstance(eps_list, list) or not eps_list:
        raise ConfigError("field 'eps_list': must be a nonempty list")
    for e in eps_list:
        if not isinstance(e, (int, float)) or not e > 0:
            raise ConfigError("field 'eps_list': entries must be positive")
    eps_list = [float(e) for e in eps_list]

    trusted = lmax - degv
    default_ks = [k for k in (5, 10, 20, 30, 40) if k <= trusted] or [trusted]
    k_list = doc.get("k_list", default_ks)
    if not isinstance(k_list, list) or not k_list:
        raise ConfigError("field 'k_list': must be a nonempty list")
    for k in k_list:
        if not isinstance(k, int) or k < 0:
            raise ConfigError("field 'k_list': entries must be nonnegative integers")

    samples = doc.get("samples", 400)
    if not isinstance(samples, int) or samples < 1:
        raise ConfigError("field 'samples': must be a positive integer")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("field 'seed': must be an integer")
    output_dir = doc.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("field 'output_dir': must be a nonempty string")

    return RunConfig(potential=V, lmax=lmax, window=window,
                     resolution=resolution, eps_list=eps_list, k_list=k_list,
                     samples=samples, output_dir=output_dir, seed=seed,
                     raw=doc)


EXAMPLE_CONFIG = """\
{
  "potential": [
    {"px": 2, "py": 0, "pz": 0, "re": 4.0},
    {"px": 0, "py": 2, "pz": 0, "re": -1.0},
    {"px": 1, "py": 1, "pz": 0, "im": 4.0}
  ],
  "lmax": 12,
  "window": {"re_min": 36.0, "re_max": 49.0, "im_min": -3.0, "im_max": 3.0},
  "resolution": {"nx": 72, "ny": 48},
  "eps_list": [0.5, 0.1, 0.02],
  "k_list": [4, 6, 8, 10],
  "samples": 400,
  "seed": 7,
  "output_dir": "out"
}
"""


# -- artifact builders --------------------------------------------------------


def _fmt(x):
    return f"{x:.17g}"


def spectrum_artifacts(cfg, threads=1):
    H = hamiltonian(cfg.potential, cfg.lmax)
    result = cluster_assign(spectrum(H, want_vectors=True),
                            cfg.potential, cfg.lmax)
    buf = io.StringIO()
    buf.write("re,im,cluster,residual\n")
    for lam, k, r in zip(result.eigenvalues, result.cluster_of, result.residuals):
        buf.write(f"{_fmt(lam.real)},{_fmt(lam.imag)},{int(k)},{_fmt(r)}\n")
    return {"spectrum.csv": buf.getvalue()}


def pspec_artifacts(cfg, threads=1):
    H = hamiltonian(cfg.potential, cfg.lmax)
    values, re_c, im_c, method = grid_sigma_min(H, cfg.window, cfg.resolution,
                                                threads=threads)
    grid = PseudospectrumGrid(values=values, re_centers=re_c, im_centers=im_c,
                              window=tuple(cfg.window), lmax=cfg.lmax,
                              potential=repr(cfg.potential), method=method)
    buf = io.StringIO()
    grid.to_csv(buf)
    svg = pspec_svg(grid, cfg.eps_list, eigenvalues=spectrum(H).eigenvalues)
    return {"pspec_grid.csv": buf.getvalue(), "pspec.svg": svg}


def numrange_artifacts(cfg, threads=1):
    degv = cfg.potential.degree or 0
    ks = [k for k in cfg.k_list if k + degv <= cfg.lmax]
    if not ks:
        raise ValueError("no cluster in k_list fits the trusted band")
    regions = {k: numerical_range_k(cfg.potential, k) for k in ks}
    limit = limit_range(cfg.potential, max(cfg.samples, 100))
    out = {}
    for k, region in regions.items():
        buf = io.StringIO()
        region.to_csv(buf)
        out[f"numrange_k{k}.csv"] = buf.getvalue()
    buf = io.StringIO()
    limit.to_csv(buf)
    out["numrange_limit.csv"] = buf.getvalue()
    out["numrange.svg"] = numrange_svg(regions, limit)
    return out


def radon_artifacts(cfg, threads=1):
    buf = io.StringIO()
    buf.write("nx,ny,nz,re_avg,im_avg\n")
    for nvec in fibonacci_sphere(cfg.samples):
        gamma = GeodesicPoint.from_normal(SpherePoint.normalized(*nvec))
        v = radon_geodesic(cfg.potential, gamma)
        buf.write(f"{_fmt(nvec[0])},{_fmt(nvec[1])},{_fmt(nvec[2])},"
                  f"{_fmt(v.real)},{_fmt(v.imag)}\n")
    return {"radon_samples.csv": buf.getvalue()}


def bracket_artifacts(cfg, threads=1):
    reports = classify_locus(cfg.potential, n_samples=cfg.samples)
    buf = io.StringIO()
    buf.write("nx,ny,nz,re_mu,im_mu,bracket,class\n")
    for rep in reports:
        n = rep.gamma.normal
        buf.write(f"{_fmt(n.x)},{_fmt(n.y)},{_fmt(n.z)},{_fmt(rep.mu.real)},"
                  f"{_fmt(rep.mu.imag)},{_fmt(rep.bracket)},"
                  f"{rep.classification}\n")
    return {"bracket_reports.csv": buf.getvalue()}


def strongest_bracket_point(V, n_samples=400):
    """Deterministic locus choice: lattice normal maximizing |bracket|."""
    br = bracket_field(V)
    pts = fibonacci_sphere(n_samples)
    bvals = br.evaluate(pts[:, 0], pts[:, 1], pts[:, 2]).real
    i = int(np.argmax(np.abs(bvals)))
    gamma = GeodesicPoint.from_normal(SpherePoint.normalized(*pts[i]))
    mu = complex(radon_poly(V)(gamma.normal)) + SPHERE.q0
    return gamma, mu, float(bvals[i])


def quasimode_artifacts(cfg, threads=1):
    degv = cfg.potential.degree or 0
    ks = [k for k in cfg.k_list if 1 <= k and k + degv <= cfg.lmax]
    if not ks:
        raise ValueError("no cluster in k_list fits the trusted band")
    gamma, mu, _ = strongest_bracket_point(cfg.potential, cfg.samples)
    buf = io.StringIO()
    buf.write("k,sigma_min_block,full_residual,coupling,"
              "tube_mass_raw,tube_mass_concentrated,block_residual_concentrated\n")
    for k in ks:
        hw = min(3.0 / np.sqrt(k), 0.95 * np.pi / 2)
        qm = cluster_quasimode(cfg.potential, cfg.lmax, k, mu)
        raw_tube = tube_mass(k, qm.coefficients, gamma, hw)
        cqm, ctube = concentrated_quasimode(cfg.potential, cfg.lmax, k, mu,
                                            gamma, hw)
        cblock = np.sqrt(max(cqm.full_residual ** 2 - cqm.coupling ** 2, 0.0))
        buf.write(f"{k},{_fmt(qm.sigma_min_block)},{_fmt(qm.full_residual)},"
                  f"{_fmt(qm.coupling)},{_fmt(raw_tube)},{_fmt(ctube)},"
                  f"{_fmt(cblock)}\n")
    return {"quasimode_decay.csv": buf.getvalue()}


_BUILDERS = {
    "spectrum": spectrum_artifacts,
    "pspec": pspec_artifacts,
    "numrange": numrange_artifacts,
    "radon": radon_artifacts,
    "bracket": bracket_artifacts,
    "quasimode": quasimode_artifacts,
}


def build_artifacts(cfg, commands, threads=1):
    """Artifacts for the given commands as {filename: text}."""
    out = {}
    for command in commands:
        try:
            builder = _BUILDERS[command]
        except KeyError:
            raise ValueError(f"unknown command {command!r}") from None
        out.update(builder(cfg, threads=threads))
    return out
