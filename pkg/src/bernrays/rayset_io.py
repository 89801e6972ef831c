"""Sparse ray-set serialization and the on-disk ray-set cache.

Format: one header line ``d,p,rho,count`` (the rho field is empty for
mean-only classes), then one line per ray of ``;``-joined
``index:mass`` pairs with 17 significant digits, which round-trips
doubles exactly. The cache stores one such file per
(d, p, rho, package version) key next to a ``.sha256`` sidecar; a
sidecar mismatch invalidates the entry instead of surfacing stale rays.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .errors import LengthMismatch, NotNormalized
from .rays_mean import MeanCorr, MeanOnly, RayDensity


def format_ray_set(
    d: int, p: float, rho: float | None, rays: list[RayDensity]
) -> str:
    rho_field = "" if rho is None else format(rho, ".17g")
    lines = [f"{d},{p:.17g},{rho_field},{len(rays)}"]
    for ray in rays:
        lines.append(
            ";".join(
                f"{s}:{m:.17g}" for s, m in zip(ray.support, ray.masses)
            )
        )
    return "\n".join(lines) + "\n"


def parse_ray_set(text: str) -> tuple[int, float, float | None, list[RayDensity]]:
    lines = text.strip("\n").split("\n")
    fields = lines[0].split(",")
    if len(fields) != 4:
        raise LengthMismatch(f"malformed ray-set header: {lines[0]!r}")
    d = int(fields[0])
    p = float(fields[1])
    rho = float(fields[2]) if fields[2] else None
    count = int(fields[3])
    if len(lines) - 1 != count:
        raise LengthMismatch(
            f"header announces {count} rays, file carries {len(lines) - 1}"
        )
    tag = MeanOnly(p) if rho is None else MeanCorr(p, rho)
    rays = []
    for line in lines[1:]:
        support = []
        masses = []
        for pair in line.split(";"):
            idx, mass = pair.split(":")
            support.append(int(idx))
            masses.append(float(mass))
        rays.append(RayDensity(d, tuple(support), tuple(masses), tag))
    return d, p, rho, rays


def _cache_file(
    cache_dir: Path, d: int, p: float, rho: float | None, version: str
) -> Path:
    key = f"{d},{p!r},{rho!r},{version}"
    digest = hashlib.sha256(key.encode()).hexdigest()[:16]
    return Path(cache_dir) / f"rayset_{digest}.txt"


def load_cached_rays(
    cache_dir: Path, d: int, p: float, rho: float | None, version: str
) -> list[RayDensity] | None:
    """Return the cached enumeration for the key, or None on any doubt:
    missing files, checksum mismatch, or a header that does not match
    the requested key."""
    path = _cache_file(cache_dir, d, p, rho, version)
    sidecar = path.with_suffix(".sha256")
    if not path.exists() or not sidecar.exists():
        return None
    text = path.read_text(encoding="utf-8")
    digest = hashlib.sha256(text.encode()).hexdigest()
    if sidecar.read_text(encoding="utf-8").strip() != digest:
        return None
    try:
        got_d, got_p, got_rho, rays = parse_ray_set(text)
    except (ValueError, LengthMismatch, NotNormalized):
        return None
    same_rho = (rho is None and got_rho is None) or (
        rho is not None and got_rho is not None and got_rho == rho
    )
    if got_d != d or got_p != p or not same_rho:
        return None
    return rays


def store_cached_rays(
    cache_dir: Path,
    d: int,
    p: float,
    rho: float | None,
    version: str,
    rays: list[RayDensity],
) -> Path:
    path = _cache_file(cache_dir, d, p, rho, version)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = format_ray_set(d, p, rho, rays)
    path.write_text(text, encoding="utf-8")
    digest = hashlib.sha256(text.encode()).hexdigest()
    path.with_suffix(".sha256").write_text(digest + "\n", encoding="utf-8")
    return path
