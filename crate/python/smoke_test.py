"""Quick end-to-end check of the pyhypthick extension."""

import math

import pyhypthick as h


def main():
    g = h.Group.shipped("triangle_2_3_7")
    assert g.dimension == 2 and abs(g.volume - math.pi / 21) < 1e-12
    assert h.Group.from_json(g.to_json()).label == g.label

    t = h.triangulate(g, 0.05)
    assert t.ok and t.euler_characteristic == 2
    assert t.report["cone_point_orders"] == [2, 3, 7]
    sk = t.skeleton()
    print("triangulation:", t.report["counts"], sk)

    e = sk.embed(dim=3, seed=1)
    assert e.verify()["pass"]
    vol, err = e.volume(samples=100_000)
    assert vol > 0 and err < 0.05 * vol
    same = h.Embedding.parse(e.to_text())
    assert same.vertices == e.vertices

    k2 = h.Embedding([[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]], [(0, 1)])
    assert k2.verify()["pass"]
    ball = h.Embedding([[0.0, 0.0, 0.0]], [])
    s = ball.slices(trials=8, samples=100_000)
    assert abs(s["max_slice"] - math.pi) < 0.1 * math.pi

    rr = h.Graph.random_regular(64, 4, seed=3)
    c = rr.cheeger()
    assert 0 < c["lower"] <= c["upper"]
    assert h.Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).cheeger("exact")["lower"] == 1.0

    m = h.mahler_measure([1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])
    assert abs(m["value"] - 1.176280818) < 1e-8
    assert h.is_cyclotomic([1, 1, 1]) and not h.is_cyclotomic([1, -3, 1])
    assert h.dobrowolski_bound(16) > 0
    b = h.bounds(math.exp(100), 3, 0.1)
    assert b["budget"] > 0
    try:
        h.mahler_measure([1, 2])
    except ValueError as exc:
        assert "monic" in str(exc)
    else:
        raise AssertionError("non-monic polynomial accepted")
    print("ok")


if __name__ == "__main__":
    main()
