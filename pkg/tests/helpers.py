"""Random domain generators and brute-force oracles shared by the tests."""

import numpy as np
from scipy import ndimage
from shapely.geometry import MultiPoint, Point, Polygon, box
from shapely.ops import unary_union

from hgraph.domain import Rectangle


def wavy_band(rng, x_lo=-3.0, x_hi=3.0, knots=7, low=(-1.5, -0.6), high=(0.6, 1.5)):
    xs = np.linspace(x_lo, x_hi, knots)
    lower = rng.uniform(*low, knots)
    upper = rng.uniform(*high, knots)
    return Polygon(np.vstack((np.column_stack((xs, lower)), np.column_stack((xs[::-1], upper[::-1])))))


def random_blob(rng, centre, radius, n=None):
    """Convex hull of random points in a disk (always a simple polygon)."""
    n = n or int(rng.integers(3, 9))
    ang = rng.uniform(0, 2 * np.pi, n)
    r = radius * rng.uniform(0.5, 1.0, n)
    hull = MultiPoint(np.column_stack((centre[0] + r * np.cos(ang), centre[1] + r * np.sin(ang)))).convex_hull
    return hull if isinstance(hull, Polygon) else Point(centre).buffer(radius, 3)


def island_domain(rng, rect: Rectangle, max_islands=4):
    """Wavy band across the rectangle with small random islands removed;
    resampled until the clip is a single polygon."""
    while True:
        band = wavy_band(rng)
        holes = [
            random_blob(rng, (rng.uniform(-1.8, 1.8), rng.uniform(-0.5, 0.5)), rng.uniform(0.05, 0.35))
            for _ in range(int(rng.integers(0, max_islands + 1)))
        ]
        dom = band.difference(unary_union(holes)) if holes else band
        clipped = dom.intersection(rect.polygon())
        if isinstance(dom, Polygon) and isinstance(clipped, Polygon) and dom.is_valid:
            return dom


def random_path(rng, rect: Rectangle, inner=None):
    inner = int(rng.integers(0, 5)) if inner is None else inner
    xs = rng.uniform(rect.x_min + 0.05, rect.x_max - 0.05, inner + 2)
    ys = np.sort(rng.uniform(rect.y_min + 0.05, rect.y_max - 0.05, inner))
    pts = np.column_stack((xs, np.concatenate(([rect.y_min], ys, [rect.y_max]))))
    return pts


def multichannel_domain(rng, a=2.0, a_prime=1.2, n_bars=None):
    """Band with horizontal bar holes spanning past +-a_prime but not +-a.
    Returns the domain and the bar polygons from bottom to top."""
    n_bars = int(rng.integers(1, 5)) if n_bars is None else n_bars
    edges = np.sort(rng.uniform(-0.9, 0.9, 2 * n_bars))
    bars = []
    for k in range(n_bars):
        y0, y1 = edges[2 * k], edges[2 * k + 1]
        if y1 - y0 < 1e-3:
            y1 = y0 + 1e-3
        c = rng.uniform(a_prime + 0.1, a - 0.1)
        bars.append(box(-c, y0, c, y1))
    band = box(-3.0, -1.0, 3.0, 1.0)
    return band.difference(unary_union(bars)), bars


def even_odd_inside(poly: Polygon, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Even-odd ray casting over every ring of the polygon."""
    inside = np.zeros(x.shape, dtype=bool)
    for ring in (poly.exterior, *poly.interiors):
        pts = np.asarray(ring.coords)
        for (x1, y1), (x2, y2) in zip(pts[:-1], pts[1:]):
            cond = (y1 > y) != (y2 > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= cond & (x < xc)
    return inside


def raster_good_count(domain: Polygon, rect: Rectangle, n=400):
    """Connected pieces of domain within the rectangle that reach both side
    columns and neither the top nor the bottom row, by flood fill."""
    xs = np.linspace(rect.x_min, rect.x_max, n)
    ys = np.linspace(rect.y_min, rect.y_max, n)
    X, Y = np.meshgrid(xs, ys)
    mask = even_odd_inside(domain, X, Y)
    labels, count = ndimage.label(mask)
    good = []
    for k in range(1, count + 1):
        m = labels == k
        if m[:, 0].any() and m[:, -1].any() and not m[0].any() and not m[-1].any():
            good.append(float(Y[m][np.argmin(X[m])]))
    return sorted(good)
