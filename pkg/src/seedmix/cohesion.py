"""Spatial neighborhoods and cohesion scoring of per-sub-region solutions.

A sub-region's neighborhood is every other sub-region whose centroid lies
within m miles (great-circle). Its cohesion score at a threshold tau
averages, over the varieties in its own solution, the mean weight each
variety carries in the neighbors' solutions at the same tau; neighbors
without a solution contribute zero weight but still count toward the
neighborhood size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .domain import SubRegion
from .errors import UndefinedScoreError
from .optimizer import MAX_VARIETIES, PortfolioSolution

EARTH_RADIUS_MILES = 3958.8


def haversine_miles(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance between two (lat, lon) points in miles."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2.0 * EARTH_RADIUS_MILES * math.asin(min(1.0, math.sqrt(a)))


@dataclass(frozen=True)
class Neighborhood:
    center: str
    radius_miles: float
    neighbors: tuple[str, ...]  # sorted, never includes the center


def near(
    regions: Mapping[str, SubRegion], center: str, m: float
) -> Neighborhood:
    """All sub-regions within m miles of the center's centroid."""
    c = regions[center]
    ids = sorted(rid for rid in regions if rid != center)
    if ids:
        lats = np.radians([regions[r].centroid_lat for r in ids])
        lons = np.radians([regions[r].centroid_lon for r in ids])
        clat = math.radians(c.centroid_lat)
        clon = math.radians(c.centroid_lon)
        a = (
            np.sin((lats - clat) / 2) ** 2
            + math.cos(clat) * np.cos(lats) * np.sin((lons - clon) / 2) ** 2
        )
        dist = 2.0 * EARTH_RADIUS_MILES * np.arcsin(np.minimum(1.0, np.sqrt(a)))
        ids = [rid for rid, d in zip(ids, dist) if d <= m]
    return Neighborhood(center=center, radius_miles=m, neighbors=tuple(ids))


def variety_score(
    variety: str,
    neighborhood: Neighborhood,
    solutions: Mapping[str, PortfolioSolution | None],
) -> float:
    """Mean weight the variety carries across the neighbors' solutions."""
    if not neighborhood.neighbors:
        raise UndefinedScoreError(
            f"sub-region {neighborhood.center!r} has no neighbors within "
            f"{neighborhood.radius_miles} miles"
        )
    total = 0.0
    for rid in neighborhood.neighbors:
        sol = solutions.get(rid)
        if sol is not None:
            total += sol.weight_of(variety)
    return total / len(neighborhood.neighbors)


def sc_score(
    solution: PortfolioSolution,
    neighborhood: Neighborhood,
    solutions: Mapping[str, PortfolioSolution | None],
    *,
    divisor_entries: bool = False,
) -> float:
    """Average of the solution's variety scores (divisor 5 by convention)."""
    total = sum(
        variety_score(code, neighborhood, solutions) for code, _ in solution.entries
    )
    divisor = len(solution.entries) if divisor_entries else MAX_VARIETIES
    return total / divisor
