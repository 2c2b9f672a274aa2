#!/usr/bin/env python3
"""Regenerate tests/fixtures/normal_tail_table.txt.

The oracle is adaptive quadrature in 50-digit arithmetic: independent of
every evaluation path used by the package (which goes through the scaled
complementary error function).  For x <= 2 the density is integrated over
(x, inf) directly.  Deeper in the tail the quadrature degrades (the
integral is astronomically smaller than the integrand peak at x), so the
Gaussian factor is peeled off first:

    tail(x) = exp(-x^2/2)/sqrt(2 pi) * int_0^inf exp(-x u - u^2/2) du

which keeps the integrand of order one.
"""

import pathlib

import mpmath as mp

XS = [-8, -5, -3, -2, -1, -0.5, 0, 0.5, 1, 2, 3, 5, 8, 10, 15, 20,
      30, 40, 50, 100, 200]

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures" \
    / "normal_tail_table.txt"


def tail(x):
    x = mp.mpf(x)
    if x <= 2:
        density = lambda t: mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi)
        return mp.quad(density, [x, mp.inf])
    peeled = mp.quad(lambda u: mp.exp(-x * u - u * u / 2), [0, mp.inf])
    return mp.exp(-x * x / 2) / mp.sqrt(2 * mp.pi) * peeled


def main() -> None:
    mp.mp.dps = 50
    lines = ["# x  tail  psi   (oracle: 50-digit quadrature of the density)"]
    for x in XS:
        t = tail(x)
        psi = -mp.log(t)
        lines.append(f"{mp.nstr(mp.mpf(x), 17)} {mp.nstr(t, 25)} "
                     f"{mp.nstr(psi, 25)}")
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT} ({len(XS)} rows)")


if __name__ == "__main__":
    main()
