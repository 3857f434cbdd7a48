"""Seeded random terms for the property suites."""

import random

from lamshift.syntax import App, Lam, Reset, Shift, Var

NAMES = ("x", "y", "z")
CONTS = ("k", "j")
CLOSED_VALUES = (
    Lam("x", Var("x")),
    Lam("x", App(Var("x"), Var("x"))),
    Lam("y", Lam("z", Var("y"))),
    Lam("x", Shift("k", Var("x"))),
)


class TermGen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def term(self, size: int = 7, scope=(), open_ok: bool = False):
        r = self.rng
        if size <= 1:
            return self._leaf(scope, open_ok)
        pick = r.random()
        if pick < 0.25:
            x = r.choice(NAMES)
            return Lam(x, self.term(size - 1, scope + (x,), open_ok))
        if pick < 0.6:
            left = r.randint(1, size - 2) if size > 2 else 1
            return App(self.term(left, scope, open_ok), self.term(max(1, size - 1 - left), scope, open_ok))
        if pick < 0.8:
            k = r.choice(CONTS)
            return Shift(k, self.term(size - 1, scope + (k,), open_ok))
        return Reset(self.term(size - 1, scope, open_ok))

    def _leaf(self, scope, open_ok):
        r = self.rng
        if scope and r.random() < 0.7:
            return Var(r.choice(scope))
        if open_ok and r.random() < 0.5:
            return Var(r.choice(NAMES))
        return r.choice(CLOSED_VALUES)

    def closed(self, size: int = 7):
        return self.term(size, (), False)

    def value(self, size: int = 5):
        x = self.rng.choice(NAMES)
        return Lam(x, self.term(size - 1, (x,), False))

    def pure_ctx(self, depth: int = 2):
        from lamshift.syntax import AppL, AppR

        frames = []
        for _ in range(self.rng.randint(0, depth)):
            if self.rng.random() < 0.5:
                frames.append(AppL(self.closed(3)))
            else:
                frames.append(AppR(self.value(3)))
        return tuple(frames)
