"""Quick end-to-end check of the Python bindings."""

import math

import levelwidth as lw


def main():
    ho = lw.Potential("harmonic:omega=1")
    assert str(ho) == "harmonic:omega=1"
    assert ho.energies(3) == [0.5, 1.5, 2.5, 3.5]
    assert math.isclose(ho.period(2.0), 2 * math.pi, rel_tol=1e-12)
    assert math.isclose(ho.action(3.0), 6 * math.pi, rel_tol=1e-12)

    widths = ho.widths(0.01, 5)
    for n, g in enumerate(widths, start=1):
        assert math.isclose(g, 0.01 * n, rel_tol=1e-12), (n, g)

    box = lw.Potential("box:L=1")
    g = box.widths(1.0, 100)[-1] / 100
    assert math.isclose(g, 0.855955390454059, rel_tol=1e-9), g

    quartic = lw.Potential("powerlaw:A=1,alpha=4")
    d = quartic.dipoles(20)
    assert len(d) == 20 and abs(d[0][1]) > abs(d[2][1]) > abs(d[4][1])

    r = lw.width_prefactor(2.0, wall=True, l_max=200)
    assert math.isclose(r["c"], 8 / math.pi**2, rel_tol=1e-6), r

    z = lw.partition_function(2.0, gamma=0.0)
    assert math.isclose(z, 0.5 / math.sinh(1.0), rel_tol=1e-8)
    rho, err = lw.density_of_states([1.0, 20.0])
    assert abs(rho[1] - 1.0) < 0.01 and max(err) < 1e-6

    try:
        lw.Potential("powerlaw:A=-1,alpha=4")
    except ValueError:
        pass
    else:
        raise AssertionError("invalid potential accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
