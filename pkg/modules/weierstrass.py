"""Long Weierstrass models over any ring of values supporting + - *."""
from functools import cached_property
from typing import Any, Callable, Tuple


class WeierstrassModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

    Coefficients may be ints, Fractions, FieldElements or BinaryForms; the
    standard invariants are computed with ring operations only, so a model
    over binary forms yields invariants as forms in (a, b).
    """

    def __init__(self, a1: Any = 0, a2: Any = 0, a3: Any = 0, a4: Any = 0, a6: Any = 0):
        self.a1 = a1
        self.a2 = a2
        self.a3 = a3
        self.a4 = a4
        self.a6 = a6

    @classmethod
    def short(cls, a4: Any, a6: Any) -> 'WeierstrassModel':
        return cls(0, 0, 0, a4, a6)

    @property
    def a_invariants(self) -> Tuple[Any, Any, Any, Any, Any]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __repr__(self):
        return f"WeierstrassModel{self.a_invariants}"

    @cached_property
    def b_invariants(self) -> Tuple[Any, Any, Any, Any]:
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return (b2, b4, b6, b8)

    @cached_property
    def c4(self):
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @cached_property
    def c6(self):
        b2, b4, b6, _ = self.b_invariants
        return -(b2 * b2 * b2) + 36 * b2 * b4 - 216 * b6

    @cached_property
    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants
        return -(b2 * b2 * b8) - 8 * (b4 * b4 * b4) - 27 * (b6 * b6) + 9 * b2 * b4 * b6

    @property
    def is_singular(self) -> bool:
        return self.discriminant == 0

    @property
    def j_invariant(self):
        if self.is_singular:
            return None
        return self.c4 * self.c4 * self.c4 / self.discriminant

    def identity_holds(self) -> bool:
        """c4^3 - c6^2 = 1728 * discriminant."""
        c4, c6 = self.c4, self.c6
        return c4 * c4 * c4 - c6 * c6 == 1728 * self.discriminant

    def rst_transform(self, r: Any, s: Any, t: Any) -> 'WeierstrassModel':
        """Substitute x = x' + r, y = y' + s x' + t."""
        a1, a2, a3, a4, a6 = self.a_invariants
        return WeierstrassModel(
            a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
        )

    def scaled(self, u: Any) -> 'WeierstrassModel':
        """Divide a_i by u^i."""
        a1, a2, a3, a4, a6 = self.a_invariants
        u2 = u * u
        u3 = u2 * u
        return WeierstrassModel(a1 / u, a2 / u2, a3 / u3, a4 / (u2 * u2), a6 / (u3 * u3))

    def map(self, fn: Callable[[Any], Any]) -> 'WeierstrassModel':
        return WeierstrassModel(*(fn(c) for c in self.a_invariants))

    def galois(self, a: int) -> 'WeierstrassModel':
        """Conjugate every coefficient by zeta -> zeta^a."""
        return self.map(lambda c: c.galois(a) if hasattr(c, 'galois') else c)

    def evaluate(self, x: Any, y: Any) -> 'WeierstrassModel':
        """Specialize a model over binary forms at (x, y)."""
        return self.map(lambda c: c.evaluate(x, y) if hasattr(c, 'evaluate') else c)

    def two_isogenous(self) -> 'WeierstrassModel':
        """Image of y^2 = x^3 + a x^2 + b x under the isogeny with kernel (0, 0)."""
        if self.a1 != 0 or self.a3 != 0 or self.a6 != 0:
            raise ValueError("two_isogenous expects y^2 = x^3 + a x^2 + b x")
        a, b = self.a2, self.a4
        return WeierstrassModel(0, -2 * a, 0, a * a - 4 * b, 0)
