"""Run configuration and the text formats accepted on the command line."""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field

from . import poly as P
from .divisor import Modulus, modulus_from_poly, parse_divisor
from .ffield import Caps, CAPS, FieldDesc, parse_field
from .groups import CONST, GA, GM, ValueFunctor, elliptic, genjac


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    field: str = "3^1"
    functors: str = ""
    dmax: int = 2
    modulus: str = ""
    m1: str = ""
    m2: str = ""
    npts: int | None = None
    nfun: int | None = None
    section: str = ""
    curve: str = ""
    point: str = ""
    entries: str = ""
    strategy: str = "DIVISIBILITY"
    search_bound: int = 3
    limit: int = 120
    seed: int = 0
    format: str = "json"
    out: str | None = None
    timing: bool = False
    caps: Caps = dc_field(default_factory=lambda: CAPS)

    def __post_init__(self):
        if self.format not in ("json", "text"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.dmax < 1 or self.dmax > self.caps.max_degree:
            raise ConfigError(f"dmax must lie in [1, {self.caps.max_degree}]")

    def record(self) -> dict:
        d = asdict(self)
        d.pop("caps")
        d.pop("out")
        d.pop("format")
        return {k: v for k, v in d.items() if v not in ("", None)}


def field_of(cfg: RunConfig) -> FieldDesc:
    try:
        return parse_field(cfg.field)
    except Exception as exc:
        raise ConfigError(f"--field {cfg.field!r}: {exc}") from exc


def _modulus_text(text: str, F: FieldDesc) -> Modulus:
    if "(" in text or "inf" in text:
        return Modulus(parse_divisor(text, F))
    return Modulus(modulus_from_poly(P.parse_poly(text, F)))


def parse_modulus(text: str, F: FieldDesc) -> Modulus:
    """'2*(inf)', '(0)+(inf)', or a polynomial such as 't^2' or 't*(t+1)'."""
    if not text:
        raise ConfigError("empty modulus")
    try:
        if "*(" in text and not re.match(r"^\d+\*", text):
            # product of polynomial factors, e.g. t*(t+1)
            f = P.const(F, 1)
            for part in re.findall(r"\(([^()]*)\)|([^*()]+)", text):
                body = part[0] or part[1]
                f = P.mul(f, P.parse_poly(body, F))
            return Modulus(modulus_from_poly(f))
        return _modulus_text(text, F)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"modulus {text!r}: {exc}") from exc


def parse_functors(text: str, F: FieldDesc) -> list[ValueFunctor]:
    """Comma-separated list: GA, GM, Z, GENJAC:<modulus>, ELL:<a>,<b>."""
    if not text:
        raise ConfigError("empty functor list")
    toks = text.split(",")
    out: list[ValueFunctor] = []
    pos, i = 0, 0
    while i < len(toks):
        tok = toks[i].strip()
        head, _, arg = tok.partition(":")
        head = head.upper()
        try:
            if head == "GA":
                out.append(GA(F))
            elif head == "GM":
                out.append(GM(F))
            elif head == "Z":
                out.append(CONST(F))
            elif head == "GENJAC":
                out.append(genjac(parse_modulus(arg, F).divisor))
            elif head == "ELL":
                if i + 1 >= len(toks):
                    raise ConfigError("ELL needs two coefficients a,b")
                b = toks[i + 1].strip()
                out.append(elliptic(F, int(arg), int(b)))
                pos += len(toks[i]) + 1
                i += 1
            else:
                raise ConfigError(f"unknown functor {head!r}")
        except ConfigError as exc:
            raise ConfigError(f"functor list, position {pos}: {exc}") from exc
        except Exception as exc:
            raise ConfigError(f"functor list, position {pos}: {exc}") from exc
        pos += len(toks[i]) + 1
        i += 1
    return out
