#!/usr/bin/env python3
"""Independent oracle for the Heisenberg vertical distance d(0, e3).

Horizontal loops from the origin reach (0, 0, t) where t is the signed area
1/2 * closed integral of (x dy - y dx). The script minimizes the perimeter of a
closed K-gon with signed area 1 using scipy (SLSQP) from a random start, and
records the regular-polygon and continuum values next to it.
"""
import json
import math
import sys

import numpy as np
from scipy.optimize import minimize


def polygon_min_perimeter(k, seed=7):
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, k))
    radii = 1.0 + 0.3 * rng.standard_normal(k)
    z0 = np.concatenate([radii * np.cos(angles), radii * np.sin(angles)])

    def split(z):
        return z[:k], z[k:]

    def perimeter(z):
        x, y = split(z)
        return float(np.sum(np.hypot(np.roll(x, -1) - x, np.roll(y, -1) - y)))

    def perimeter_grad(z):
        x, y = split(z)
        dx, dy = np.roll(x, -1) - x, np.roll(y, -1) - y
        ln = np.hypot(dx, dy)
        return np.concatenate([np.roll(dx / ln, 1) - dx / ln, np.roll(dy / ln, 1) - dy / ln])

    def area(z):
        x, y = split(z)
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def area_grad(z):
        x, y = split(z)
        return 0.5 * np.concatenate([np.roll(y, -1) - np.roll(y, 1), np.roll(x, 1) - np.roll(x, -1)])

    res = minimize(perimeter, z0, jac=perimeter_grad, method="SLSQP",
                   constraints=[{"type": "eq", "fun": lambda z: area(z) - 1.0, "jac": area_grad}],
                   options={"maxiter": 2000, "ftol": 1e-14})
    if not res.success:
        raise RuntimeError(res.message)
    return perimeter(res.x), area(res.x)


def main():
    out_path = sys.argv[1] if len(sys.argv) > 1 else "heisenberg_cc_vertical.json"
    segments = 32
    p32, a32 = polygon_min_perimeter(segments)
    regular = math.sqrt(4.0 * segments * math.tan(math.pi / segments))
    if abs(p32 - regular) > 1e-6:
        raise RuntimeError(f"optimized polygon {p32} disagrees with regular polygon {regular}")
    data = {
        "algebra": "heisenberg1",
        "target": [0.0, 0.0, 1.0],
        "continuum_distance": math.sqrt(4.0 * math.pi),
        "polygon_segments": segments,
        "polygon_distance": p32,
        "polygon_area_check": a32,
        "regular_polygon_distance": regular,
        "tolerance_relative": 0.02,
    }
    with open(out_path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(data, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
