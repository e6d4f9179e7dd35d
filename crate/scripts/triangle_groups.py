#!/usr/bin/env python3
"""Generate the shipped group-definition files.

Triangle groups D(p, q, r) are the orientation-preserving index-2 subgroups
of the reflection group of a hyperbolic triangle with angles pi/p, pi/q,
pi/r. The triangle is placed in the hyperboloid model with the pi/r vertex
at the origin o = (1, 0, 0) and the pi/q vertex on the positive x1 axis.
Side lengths follow from the hyperbolic law of cosines for angles:

    cosh(a) = (cos A + cos B cos C) / (sin B sin C)

Generators are the rotations by 2*pi/k about each vertex (k = p, q, r).
The orbifold is a sphere with three cone points, area 2*pi*(1 - 1/p - 1/q - 1/r).

Also writes a cyclic boost group and a rank-2 Schottky group.

Usage: python3 scripts/triangle_groups.py [output_dir]
"""
import json
import math
import sys
from pathlib import Path

import numpy as np


def boost(t):
    c, s = math.cosh(t), math.sinh(t)
    return np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def point(d, phi):
    return np.array([math.cosh(d), math.sinh(d) * math.cos(phi), math.sinh(d) * math.sin(phi)])


def rotation_about(d, phi, theta):
    """Rotation by theta about the point at distance d, polar angle phi from o."""
    t = rot(phi) @ boost(d) @ rot(-phi)
    return t @ rot(theta) @ np.linalg.inv(t)


def triangle_group(p, q, r):
    a_ang, b_ang, c_ang = math.pi / p, math.pi / q, math.pi / r
    # R = o (angle pi/r); Q on the x1 axis (angle pi/q); P at angle c_ang (angle pi/p).
    rq = math.acosh((math.cos(a_ang) + math.cos(b_ang) * math.cos(c_ang)) / (math.sin(b_ang) * math.sin(c_ang)))
    rp = math.acosh((math.cos(b_ang) + math.cos(a_ang) * math.cos(c_ang)) / (math.sin(a_ang) * math.sin(c_ang)))
    gens = [
        rotation_about(rp, c_ang, 2 * math.pi / p),
        rotation_about(rq, 0.0, 2 * math.pi / q),
        rot(2 * math.pi / r),
    ]
    cone_points = [point(rp, c_ang), point(rq, 0.0), point(0.0, 0.0)]
    return gens, cone_points


def check_isometry(m):
    j = np.diag([-1.0, 1.0, 1.0])
    assert np.max(np.abs(m.T @ j @ m - j)) < 1e-12
    assert m[0, 0] > 0


def write(path, label, gens, volume=None, deg_k=None, q=None):
    for g in gens:
        check_isometry(g)
    doc = {
        "dimension": 2,
        "label": label,
        "generators": [[float(x) for x in g.reshape(-1)] for g in gens],
    }
    if volume is not None:
        doc["volume"] = volume
    if deg_k is not None:
        doc["deg_k"] = deg_k
    if q is not None:
        doc["q"] = q
    path.write_text(json.dumps(doc, indent=2) + "\n")


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "crates/core/data/groups"
    out.mkdir(parents=True, exist_ok=True)

    for (p, q, r, deg_k) in [(2, 3, 7, 3), (2, 3, 8, 2)]:
        gens, cones = triangle_group(p, q, r)
        for g, c, k in zip(gens, cones, (p, q, r)):
            assert np.allclose(g @ c, c, atol=1e-12)
            assert np.allclose(np.linalg.matrix_power(g, k), np.eye(3), atol=1e-10)
        area = 2 * math.pi * (1 - 1 / p - 1 / q - 1 / r)
        write(out / f"triangle_{p}_{q}_{r}.json", f"triangle({p},{q},{r})", gens, area, deg_k, r)

    write(out / "cyclic_boost.json", "cyclic boost t=1", [boost(1.0)], q=1)
    write(out / "schottky.json", "schottky rank 2 t=3", [boost(3.0), rot(math.pi / 2) @ boost(3.0) @ rot(-math.pi / 2)], q=1)


if __name__ == "__main__":
    main()
