"""Flat key-value scenario configuration files.

Format: one ``key = value`` pair per line, ``#`` starts a comment, blank
lines ignored.  Keys are grouped by dotted prefixes (scenario.*, fluid.*,
field.*, scheme.*, time.*, solver.*); docs/formats.md lists them all.
"""

import hashlib
from dataclasses import replace

from .driver import ScenarioConfig
from .fieldgen import FieldSpec
from .rockfluid import FluidModel
from .snapshots import read_snapshot


class ConfigError(ValueError):
    """Malformed or inconsistent configuration file."""


def parse_flat(text: str) -> dict:
    """Parse ``key = value`` lines into a dict (later keys win)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def _take(pairs, key, convert, default=None, required=False):
    if key not in pairs:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return convert(pairs.pop(key))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}") from exc


def _float_list(text: str):
    text = text.strip()
    if not text:
        return ()
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def config_from_pairs(pairs: dict, base_dir=None) -> ScenarioConfig:
    pairs = dict(pairs)
    fluid = FluidModel(
        mu_w=_take(pairs, "fluid.mu_w", float, 0.05),
        mu_o=_take(pairs, "fluid.mu_o", float, 10.0),
        s_rw=_take(pairs, "fluid.s_rw", float, 0.2),
        s_ro=_take(pairs, "fluid.s_ro", float, 0.15),
    )
    nx = _take(pairs, "scenario.nx", int, 64)
    ny = _take(pairs, "scenario.ny", int, 16)
    lx = _take(pairs, "scenario.lx", float, 256.0)
    ly = _take(pairs, "scenario.ly", float, 64.0)

    permeability = None
    field_spec = None
    field_kind = _take(pairs, "field.kind", str, "generated")
    if field_kind == "file":
        path = _take(pairs, "field.path", str, required=True)
        if base_dir is not None:
            import os

            path = os.path.join(base_dir, path) if not os.path.isabs(path) else path
        permeability = read_snapshot(path).field
    elif field_kind == "generated":
        field_spec = FieldSpec(
            nx=nx, ny=ny, lx=lx, ly=ly,
            target_cv=_take(pairs, "field.target_cv", float, 0.5),
            mean_perm=_take(pairs, "field.mean_perm", float, 100.0),
            hurst_like_exponent=_take(pairs, "field.hurst", float, 0.5),
            seed=_take(pairs, "field.seed", int, 0),
        )
    else:
        raise ConfigError(f"field.kind must be 'generated' or 'file', got {field_kind!r}")

    try:
        cfg = ScenarioConfig(
            kind=_take(pairs, "scenario.kind", str, "slab"),
            nx=nx, ny=ny, lx=lx, ly=ly,
            fluid=fluid,
            permeability=permeability,
            field_spec=field_spec,
            initial_saturation=_take(pairs, "scenario.initial_saturation", float, 0.21),
            injection_pv_per_year=_take(pairs, "scenario.injection_pv_per_year", float, 0.2),
            scheme=_take(pairs, "scheme.kind", str, "nt"),
            theta=_take(pairs, "scheme.theta", float, 1.5),
            cfl_nt=_take(pairs, "scheme.cfl_nt", float, 0.45),
            cfl_kt=_take(pairs, "scheme.cfl_kt", float, 0.25),
            dt_pressure_days=_take(pairs, "time.dt_pressure_days", float),
            end_time_days=_take(pairs, "time.end_days", float, 100.0),
            snapshot_days=_take(pairs, "time.snapshot_days", _float_list, ()),
            time_scale=_take(pairs, "time.scale", float, 1.0),
            transport_dt_factor=_take(pairs, "scheme.transport_dt_factor", float, 1.0),
            pcg_tol=_take(pairs, "solver.pcg_tol", float, 1e-10),
            pcg_preconditioner=_take(pairs, "solver.pcg_preconditioner", str, "jacobi"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if pairs:
        raise ConfigError(f"unknown configuration keys: {sorted(pairs)}")
    return cfg


def load_config(path) -> ScenarioConfig:
    import os

    with open(path, "r", encoding="ascii") as fh:
        pairs = parse_flat(fh.read())
    return config_from_pairs(pairs, base_dir=os.path.dirname(os.path.abspath(path)))


def with_overrides(cfg: ScenarioConfig, scheme=None, seed=None, snapshot_days=None):
    """CLI-style overrides on a loaded configuration."""
    changes = {}
    if scheme is not None:
        changes["scheme"] = scheme
    if seed is not None:
        if cfg.field_spec is None:
            raise ConfigError("--seed requires a generated permeability field")
        changes["field_spec"] = replace(cfg.field_spec, seed=seed)
    if snapshot_days is not None:
        changes["snapshot_days"] = tuple(snapshot_days)
    return replace(cfg, **changes) if changes else cfg


def config_hash(cfg: ScenarioConfig) -> str:
    """Short digest of every physics-relevant configuration field."""
    f = cfg.fluid
    parts = [
        cfg.kind, cfg.nx, cfg.ny, cfg.lx, cfg.ly,
        f.mu_w, f.mu_o, f.s_rw, f.s_ro,
        cfg.initial_saturation, cfg.injection_pv_per_year,
        cfg.scheme, cfg.theta, cfg.cfl_nt, cfg.cfl_kt,
        cfg.dt_pressure_days, cfg.end_time_days, cfg.time_scale,
        cfg.transport_dt_factor, cfg.pcg_tol, cfg.pcg_preconditioner,
    ]
    if cfg.permeability is not None:
        parts.append("perm-data")
        parts.append(hashlib.sha256(cfg.permeability.flat().tobytes()).hexdigest())
    elif cfg.field_spec is not None:
        s = cfg.field_spec
        parts += ["perm-spec", s.nx, s.ny, s.lx, s.ly, s.target_cv, s.mean_perm,
                  s.hurst_like_exponent, s.seed]
    else:
        parts.append("perm-default")
    blob = "|".join(repr(p) for p in parts).encode("ascii")
    return hashlib.sha256(blob).hexdigest()[:16]
