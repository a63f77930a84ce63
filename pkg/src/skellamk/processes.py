"""Process family descriptions shared by the analytic, simulation and CLI layers."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .subordinators import SubordinatorSpec

__all__ = ["ProcessSpec", "FAMILIES", "parse_params"]

FAMILIES = (
    "skellam",
    "ppok",
    "spok",
    "ra_ppok",
    "ra_spok",
    "sfpp",
    "tsfpp",
    "sfsp",
    "tsfsp",
    "tcspok",
)

# which fields each family reads; anything else must stay at its default
_USES = {
    "skellam": ("l1", "l2"),
    "ppok": ("k", "l1"),
    "spok": ("k", "l1", "l2"),
    "ra_ppok": ("k", "l1"),
    "ra_spok": ("k", "l1", "l2"),
    "sfpp": ("alpha1", "l1"),
    "tsfpp": ("alpha1", "mu1", "l1"),
    "sfsp": ("alpha1", "alpha2", "l1", "l2"),
    "tsfsp": ("alpha1", "mu1", "alpha2", "mu2", "l1", "l2"),
    "tcspok": ("k", "l1", "l2", "sub"),
}

_ALIASES = {
    "l": "l1",
    "lam": "l1",
    "lambda": "l1",
    "lambda1": "l1",
    "lambda2": "l2",
    "alpha": "alpha1",
    "mu": "mu1",
}


@dataclass(frozen=True)
class ProcessSpec:
    """Tagged description of a process family and its parameters.

    Single-rate families (ppok, ra_ppok, sfpp, tsfpp) keep their rate in
    ``l1``; single-index fractional families keep alpha/mu in ``alpha1``/``mu1``.
    """

    family: str
    k: int = 1
    l1: float = 1.0
    l2: float = 0.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    mu1: float = 0.0
    mu2: float = 0.0
    sub: SubordinatorSpec | None = None

    def __post_init__(self):
        fam = self.family
        if fam not in FAMILIES:
            raise ValueError(f"unknown process family {fam!r}")
        uses = _USES[fam]
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be an integer >= 1")
        object.__setattr__(self, "k", int(self.k))
        if not self.l1 > 0:
            raise ValueError("l1 must be positive")
        if "l2" in uses:
            # l2 = 0 is the flagged reduction to the one-sided process
            if self.l2 < 0 or (self.l2 == 0 and fam in ("sfsp", "tsfsp", "tcspok")):
                raise ValueError("l2 out of range")
        for a in ("alpha1", "alpha2"):
            if a in uses and not 0 < getattr(self, a) <= 1:
                raise ValueError(f"{a} must lie in (0, 1]")
        for m in ("mu1", "mu2"):
            if m in uses and not getattr(self, m) > 0:
                raise ValueError(f"{m} must be positive")
        if fam == "tcspok":
            if self.sub is None:
                raise ValueError("tcspok needs a subordinator")
            if self.sub.family == "stable":
                raise ValueError("the stable subordinator has no finite moments; not allowed for tcspok")

    # constructors mirroring the usual parameter order
    @classmethod
    def skellam(cls, l1, l2):
        return cls("skellam", l1=l1, l2=l2)

    @classmethod
    def ppok(cls, k, lam):
        return cls("ppok", k=k, l1=lam)

    @classmethod
    def spok(cls, k, l1, l2):
        return cls("spok", k=k, l1=l1, l2=l2)

    @classmethod
    def ra_ppok(cls, k, lam):
        return cls("ra_ppok", k=k, l1=lam)

    @classmethod
    def ra_spok(cls, k, l1, l2):
        return cls("ra_spok", k=k, l1=l1, l2=l2)

    @classmethod
    def sfpp(cls, alpha, lam):
        return cls("sfpp", alpha1=alpha, l1=lam)

    @classmethod
    def tsfpp(cls, alpha, mu, lam):
        return cls("tsfpp", alpha1=alpha, mu1=mu, l1=lam)

    @classmethod
    def sfsp(cls, alpha1, alpha2, l1, l2):
        return cls("sfsp", alpha1=alpha1, alpha2=alpha2, l1=l1, l2=l2)

    @classmethod
    def tsfsp(cls, alpha1, mu1, alpha2, mu2, l1, l2):
        return cls("tsfsp", alpha1=alpha1, mu1=mu1, alpha2=alpha2, mu2=mu2, l1=l1, l2=l2)

    @classmethod
    def tcspok(cls, k, l1, l2, sub):
        return cls("tcspok", k=k, l1=l1, l2=l2, sub=sub)

    @property
    def lam(self):
        return self.l1

    @property
    def alpha(self):
        return self.alpha1

    @property
    def mu(self):
        return self.mu1

    @property
    def one_sided(self):
        """True when the process lives on the non-negative integers."""
        return self.family in ("ppok", "sfpp", "tsfpp", "ra_ppok") or (
            self.family in ("skellam", "spok", "ra_spok") and self.l2 == 0
        )

    @property
    def lattice(self):
        """Integer-valued marginals (running averages are continuous)."""
        return not self.family.startswith("ra_")

    def components(self):
        """The two one-sided component processes of a difference family."""
        fam = self.family
        if fam == "sfsp":
            return ProcessSpec.sfpp(self.alpha1, self.l1), ProcessSpec.sfpp(self.alpha2, self.l2)
        if fam == "tsfsp":
            return (
                ProcessSpec.tsfpp(self.alpha1, self.mu1, self.l1),
                ProcessSpec.tsfpp(self.alpha2, self.mu2, self.l2),
            )
        if fam in ("skellam", "spok"):
            k = self.k if fam == "spok" else 1
            second = ProcessSpec.ppok(k, self.l2) if self.l2 > 0 else None
            return ProcessSpec.ppok(k, self.l1), second
        raise ValueError(f"{fam} is not a difference of one-sided processes")

    def params(self):
        out = {}
        for name in _USES[self.family]:
            if name == "sub":
                out["sub"] = self.sub.to_dict()
            else:
                out[name] = getattr(self, name)
        return out

    def to_dict(self):
        return {"family": self.family, **self.params()}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        fam = d.pop("family")
        sub = d.pop("sub", None)
        kw = {}
        for key, val in d.items():
            key = _ALIASES.get(key, key)
            kw[key] = int(val) if key == "k" else float(val)
        if sub is not None and not isinstance(sub, SubordinatorSpec):
            sub = SubordinatorSpec.from_dict(sub)
        unknown = set(kw) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown parameters {sorted(unknown)}")
        return cls(fam, sub=sub, **kw)

    def with_(self, **kw):
        return replace(self, **kw)


def parse_params(family, text):
    """Parse ``k=2,l1=1,l2=0.5`` style strings into a ProcessSpec.

    Subordinators are given with ``sub=<family>`` plus ``sub_<param>=value``
    entries, e.g. ``sub=gamma,sub_p=2,sub_alpha=3``.
    """
    d = {"family": family}
    sub = {}
    for item in filter(None, (s.strip() for s in (text or "").split(","))):
        if "=" not in item:
            raise ValueError(f"malformed parameter {item!r}; expected name=value")
        key, val = (s.strip() for s in item.split("=", 1))
        if key == "sub":
            sub["family"] = val
        elif key.startswith("sub_"):
            sub[key[4:]] = val
        else:
            d[key] = val
    if sub:
        d["sub"] = sub
    return ProcessSpec.from_dict(d)
