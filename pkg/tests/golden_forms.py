"""Reference closed forms for level-2 chiral moments, kept exactly as given.

Each function takes (beta, r, theta) and returns the reference value.
"""
import numpy as np
from numpy import cos, sin, pi


def f2_11_11_11_11(b, r, t):
    bt = b * t
    return (bt**8 / (1024 * pi**8) * sin(pi * r) ** 8
            + bt**6 / (512 * pi**6) * sin(pi * r) ** 6 * (cos(2 * pi * r) - 17)
            + bt**4 / (4096 * pi**4) * sin(pi * r) ** 4 * (5 * cos(4 * pi * r) - 84 * cos(2 * pi * r) + 1359)
            + bt**2 / (8192 * pi**2) * sin(pi * r) ** 2
            * (3 * cos(6 * pi * r) + 142 * cos(4 * pi * r) - 83 * cos(2 * pi * r) - 8254)
            + (9 * cos(8 * pi * r) + 1080 * cos(6 * pi * r) + 4604 * cos(4 * pi * r)
               + 37256 * cos(2 * pi * r) + 88123) / 131072)


def f2_11_2_11_2(b, r, t):
    bt = b * t
    s, c = sin(pi * r), cos(pi * r)
    return (-bt**6 * c**2 * s**6 / (64 * pi**6)
            + bt**4 * (25 * cos(2 * pi * r) + 23) * s**6 / (1024 * pi**4)
            - bt**2 * 3 * (7 * cos(2 * pi * r) + 17) * s**6 / (512 * pi**2)
            + 3 * (9 * cos(2 * pi * r) + 71) * s**6 / 1024)


def f2_11_11_2_2(b, r, t):
    bt = b * t
    ch, sh = cos(pi * r / 2), sin(pi * r / 2)
    C = lambda k: cos(k * pi * r)
    return (-bt**6 / (64 * pi**6) * C(1) ** 2 * sin(pi * r) ** 6
            + bt**4 / (8 * pi**4) * ch**6 * sh**4 * (-2 * C(3) + 13 * C(2) + 8 * C(1) + 17)
            - bt**2 / (32 * pi**2) * ch**6 * sh**2 * (C(4) - 34 * C(3) + 64 * C(2) - 46 * C(1) + 143)
            + ch**6 * (25 * C(4) - 118 * C(3) + 376 * C(2) - 778 * C(1) + 623) / 128)


def f2_11_2_2_11(b, r, t):
    bt = b * t
    ch, sh = cos(pi * r / 2), sin(pi * r / 2)
    C = lambda k: cos(k * pi * r)
    return (-bt**6 / (64 * pi**6) * C(1) ** 2 * sin(pi * r) ** 6
            + bt**4 / (8 * pi**4) * ch**4 * sh**6 * (2 * C(3) + 13 * C(2) - 8 * C(1) + 17)
            - bt**2 / (32 * pi**2) * ch**2 * sh**6 * (C(4) + 34 * C(3) + 64 * C(2) + 46 * C(1) + 143)
            + sh**6 * (25 * C(4) + 118 * C(3) + 376 * C(2) + 778 * C(1) + 623) / 128)


def f2_2_2_2_2(b, r, t):
    bt = b * t
    C = lambda k: cos(k * pi * r)
    s2 = sin(2 * pi * r)
    return (bt**4 / (64 * pi**4) * s2**4
            + bt**2 / (512 * pi**2) * s2**2 * (9 * C(4) - 4 * C(2) - 133)
            + (81 * C(8) + 56 * C(6) + 1628 * C(4) + 8072 * C(2) + 22931) / 32768)


def f2_11_2_2_2(b, r, t):
    # reference at beta = 1 (theta carries no beta)
    s, c = sin(pi * r), cos(pi * r)
    C = lambda k: cos(k * pi * r)
    return (-1j * t**3 * s**3 * c / (1024 * pi**3) * (4 * C(2) - 17 * C(4) + 141)
            + 1j * t**5 * s**5 * c**3 / (16 * pi**5)
            - 1j * t * s**3 / (2048 * pi) * (754 * C(1) + 5 * C(3) + 9 * C(5)))


def f2_11_11_11_2(b, r, t):
    s = sin(pi * r)
    C = lambda k: cos(k * pi * r)
    return (-1j * t**7 * s**7 * C(1) / (256 * pi**7)
            + 1j * t**5 * s**5 / (1024 * pi**5) * (67 * C(1) - 3 * C(3))
            - 1j * t**3 * s**3 / (4096 * pi**3) * (650 * C(1) - 143 * C(3) + 5 * C(5))
            - 1j * t * s**3 / (4096 * pi) * (1466 * C(1) + 73 * C(3) - 3 * C(5)))


LEVEL2_FORMS = {
    ((1, 1), (1, 1), (1, 1), (1, 1)): f2_11_11_11_11,
    ((1, 1), (2,), (1, 1), (2,)): f2_11_2_11_2,
    ((1, 1), (1, 1), (2,), (2,)): f2_11_11_2_2,
    ((1, 1), (2,), (2,), (1, 1)): f2_11_2_2_11,
    ((2,), (2,), (2,), (2,)): f2_2_2_2_2,
    ((1, 1), (2,), (2,), (2,)): f2_11_2_2_2,
    ((1, 1), (1, 1), (1, 1), (2,)): f2_11_11_11_2,
}


def f1_single(b, r, t, k=1):
    return 1 - b**2 * t**2 * sin(k * pi * r) ** 2 / (k * pi**2)


def f1_11_11(b, r, t):
    return 1 - 2 * b**2 * t**2 / pi**2 * sin(pi * r) ** 2 + b**4 * t**4 / (2 * pi**4) * sin(pi * r) ** 4


def f1_11_2(b, r, t):
    return -1j * b**3 * t**3 / pi**3 * sin(pi * r) ** 3 * cos(pi * r)


def f1_2_2(b, r, t):
    return 1 - b**2 * t**2 / (2 * pi**2) * sin(2 * pi * r) ** 2


def f2_dphi_vacuum_normalized(b, r, t):
    """Reference as 1 - 1 * beta^2 theta^2 sin^2(pi r/2)/pi^2 (value over its theta = 0 value)."""
    return 1 - b**2 * t**2 * sin(pi * r / 2) ** 2 / pi**2


def f2_dphi4(b, r, t):
    bt = b * t
    return (bt**4 * sin(pi * r) ** 4 / (16 * pi**4)
            + bt**2 / (16 * pi**2) * sin(pi * r) ** 2 * (cos(2 * pi * r) - 9)
            + (cos(2 * pi * r) + 7) ** 2 / 64)


def test2_bracket(b, r, t, a, theta2_sign=+1, cross_factor=1.0):
    """Bracket of the dphi / vertex relative-entropy moment.

    Reference: +beta theta^2 sin^2(pi r)/(4 pi^2) and cross term
    i beta theta alpha sin^2(pi r/2) sin(pi r)/(2 pi).  The keyword
    arguments allow comparing corrected variants.
    """
    return (theta2_sign * b**2 * t**2 / (4 * pi**2) * sin(pi * r) ** 2
            + cross_factor * 1j * b * t * a / (2 * pi) * sin(pi * r / 2) ** 2 * sin(pi * r)
            + (1 + cos(pi * r)) / 2 + a**2 * sin(pi * r / 2) ** 4)


def delta_z2_real(b, r, t):
    bt = b * t
    s = sin(pi * r)
    C = lambda k: cos(k * pi * r)
    return (bt**8 / (4096 * pi**8) * s**8
            - bt**6 / (2048 * pi**6) * (41 + 23 * C(2)) * s**6
            + bt**4 / (16384 * pi**4) * (3129 + 1460 * C(2) + 19 * C(4)) * s**4
            + bt**2 / (32768 * pi**2) * (-24826 - 9417 * C(2) + 1386 * C(4) + 89 * C(6)) * s**2)


def delta_z2_imag_reference(b, r, t):
    """Imaginary part exactly as reference (theta not beta-scaled)."""
    s, c = sin(pi * r), cos(pi * r)
    x = t / pi**2
    br = (3 * t**6 / pi**6 - 89 * t**4 / pi**4 + 681 * t**2 / pi**2
          + (1 - x) ** 2 * (x + 1) ** 2 * ((68 - 4 * t**2 / pi**2) * cos(2 * pi * r)
                                           + (t**2 / pi**2 + 15) * cos(4 * pi * r)) + 1453)
    return -t * s**3 * c / (2048 * pi) * br
