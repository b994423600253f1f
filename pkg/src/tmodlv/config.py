"""Run configuration: the line-based `key = value` format with [section]
headers, strict about unknown keys, validated semantically, and echoed
verbatim in every report header."""

from __future__ import annotations

import configparser
import io

from .ffield import FqField
from .fields import (
    ExtensionData,
    Place,
    PrimeOfA,
    carlitz_cyclotomic_deg1,
    trivial_extension,
)
from .groups import GroupSpec
from .laurent import Laurent
from .matrix import Mat
from .motive import carlitz_tensor, drinfeld_twist
from .poly import PolyRing
from .serialize import ParseError, parse_apoly, parse_fq
from .tmodule import TModuleSpec, make_carlitz, make_drinfeld


class ConfigError(ValueError):
    pass


_KNOWN = {
    "field": {"p", "r", "modulus"},
    "extension": {
        "kind",
        "conductor",
        "degree",
        "group",
        "mult_table",
        "g_action",
        "place_e",
        "pi_scale",
        "basis_embeddings",
        "t_embedding",
    },
    "tmodule": {"kind", "coeffs", "m"},
    "run": {"precision", "taming_set", "max_prime_degree", "format"},
}


class RunConfig:
    def __init__(self, text: str):
        self.text = text.strip()
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as ex:
            raise ConfigError(f"config syntax: {ex}") from ex
        for section in cp.sections():
            if section not in _KNOWN:
                raise ConfigError(f"unknown section [{section}]")
            for key in cp[section]:
                if key not in _KNOWN[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
        self._cp = cp
        self.field = self._build_field()
        self.extension = self._build_extension()
        self.tmodule = self._build_tmodule()
        run = cp["run"] if cp.has_section("run") else {}
        try:
            self.precision = int(run.get("precision", 4))
        except ValueError as ex:
            raise ConfigError(f"precision: {ex}") from ex
        if self.precision < 1:
            raise ConfigError("precision must be a positive integer")
        self.taming_set = self._parse_taming(run.get("taming_set", ""))
        mpd = run.get("max_prime_degree", "")
        self.max_prime_degree = int(mpd) if mpd else None
        self.format = run.get("format", "text")
        if self.format not in ("text", "jsonl"):
            raise ConfigError("format must be text or jsonl")

    # -- sections ---------------------------------------------------------

    def _build_field(self) -> FqField:
        if not self._cp.has_section("field"):
            raise ConfigError("missing [field] section")
        sec = self._cp["field"]
        try:
            p = int(sec.get("p", ""))
            r = int(sec.get("r", "1"))
        except ValueError as ex:
            raise ConfigError(f"field: {ex}") from ex
        modulus_text = sec.get("modulus", "")
        try:
            if r == 1 and not modulus_text:
                return FqField(p)
            if not modulus_text:
                raise ConfigError("GF(p^r) with r > 1 needs an explicit modulus")
            base = FqField(p)
            mod = _parse_fp_poly(base, modulus_text)
            return FqField(p, r, mod)
        except (ValueError, ParseError) as ex:
            raise ConfigError(str(ex)) from ex

    def _build_extension(self) -> ExtensionData:
        if not self._cp.has_section("extension"):
            return trivial_extension(self.field)
        sec = self._cp["extension"]
        kind = sec.get("kind", "trivial")
        if kind == "trivial":
            return trivial_extension(self.field)
        if kind == "carlitz_cyclotomic":
            if self.field.q < 3:
                raise ConfigError("carlitz_cyclotomic requires q >= 3")
            cond = sec.get("conductor", "t")
            try:
                P = PrimeOfA(self.field, parse_apoly(self.field, cond))
            except (ParseError, ValueError) as ex:
                raise ConfigError(f"conductor: {ex}") from ex
            if P.deg != 1:
                raise ConfigError("built-in cyclotomic extensions need a degree-1 conductor")
            return carlitz_cyclotomic_deg1(self.field, P)
        if kind == "explicit":
            return self._build_explicit(sec)
        raise ConfigError(f"unknown extension kind {kind!r}")

    def _build_explicit(self, sec) -> ExtensionData:
        F = self.field
        A = PolyRing(F)
        try:
            d = int(sec.get("degree", ""))
            orders = tuple(int(x) for x in sec.get("group", "").split(",") if x.strip())
            G = GroupSpec(orders)
            mult = _parse_table(F, sec.get("mult_table", ""), d)
            gact = {}
            rows = [r for r in sec.get("g_action", "").split(";") if r.strip()]
            for g, row in zip(G.elements(), rows):
                entries = [parse_apoly(F, x) if x.strip() not in ("", "0") else A.zero for x in row.split(",")]
                gact[g] = Mat(A, [entries[i * d : (i + 1) * d] for i in range(d)])
            e = int(sec.get("place_e", str(d)))
            scales = [parse_fq(F, x) for x in sec.get("pi_scale", "1").split(",")]
            pi_scale = {g: scales[i % len(scales)] for i, g in enumerate(G.elements())}
            place = Place(F, e, 1, pi_scale)
            basis_emb = [
                [_parse_pi_laurent(F, x) for x in sec.get("basis_embeddings", "").split(";")]
            ]
            t_emb = [_parse_pi_laurent(F, sec.get("t_embedding", ""))]
            return ExtensionData(F, G, mult, gact, [place], basis_emb, t_emb, "explicit")
        except (ParseError, ValueError) as ex:
            raise ConfigError(f"explicit extension: {ex}") from ex

    def _build_tmodule(self) -> TModuleSpec:
        if not self._cp.has_section("tmodule"):
            return make_carlitz(self.field)
        sec = self._cp["tmodule"]
        kind = sec.get("kind", "carlitz")
        if kind == "carlitz":
            return make_carlitz(self.field)
        if kind == "drinfeld":
            coeffs_text = sec.get("coeffs", "")
            try:
                coeffs = [parse_apoly(self.field, x) for x in coeffs_text.split(",") if x.strip()]
            except ParseError as ex:
                raise ConfigError(f"tmodule coeffs: {ex}") from ex
            if not coeffs:
                raise ConfigError("drinfeld module needs coeffs")
            return make_drinfeld(self.field, coeffs)
        if kind == "carlitz_tensor":
            m = int(sec.get("m", "1"))
            if m < 1:
                raise ConfigError("carlitz_tensor needs m >= 1")
            return carlitz_tensor(self.field, m)
        if kind == "drinfeld_twist":
            coeffs = [parse_apoly(self.field, x) for x in sec.get("coeffs", "1").split(",") if x.strip()]
            m = int(sec.get("m", "1"))
            return drinfeld_twist(make_drinfeld(self.field, coeffs), m)
        raise ConfigError(f"unknown tmodule kind {kind!r}")

    def _parse_taming(self, text: str) -> list[PrimeOfA]:
        out = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                out.append(PrimeOfA(self.field, parse_apoly(self.field, part)))
            except (ParseError, ValueError) as ex:
                raise ConfigError(f"taming_set: {ex}") from ex
        return out

    # -- canonical echo -----------------------------------------------------

    def header(self) -> dict:
        F = self.field
        base = FqField(F.p)
        return {
            "field": f"GF({F.p}^{F.r})",
            "modulus": base.el_str_poly(list(self.field.modulus)),
            "group": repr(self.extension.group),
            "extension": self.extension.label,
            "tmodule": self.tmodule.label,
            "precision": self.precision,
            "taming_set": [repr(v) for v in self.taming_set],
            "cutoff": self.max_prime_degree,
        }

    def serialize(self) -> str:
        out = io.StringIO()
        self._cp.write(out)
        return out.getvalue().strip()


def _parse_fp_poly(base: FqField, text: str) -> tuple:
    """Modulus over F_p in the generator x."""
    text = text.replace(" ", "").replace("x", "t")
    return parse_apoly(base, text)


def _parse_table(F: FqField, text: str, d: int):
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) != d * d:
        raise ConfigError("mult_table needs d*d rows (w_i w_j expansions)")
    A = PolyRing(F)
    table = []
    k = 0
    for i in range(d):
        row = []
        for j in range(d):
            entries = [
                parse_apoly(F, x) if x.strip() not in ("", "0") else A.zero
                for x in rows[k].split(",")
            ]
            if len(entries) != d:
                raise ConfigError("mult_table row arity mismatch")
            row.append(entries)
            k += 1
        table.append(row)
    return table


def _parse_pi_laurent(F: FqField, text: str) -> Laurent:
    """`c*pi^e + ...` exact local expansions for explicit extensions."""
    items: dict[int, int] = {}
    for part in text.replace(" ", "").split("+"):
        if not part:
            continue
        import re

        m = re.fullmatch(r"(?:(\d+)\*?)?pi(?:\^(-?\d+))?", part)
        if m:
            c = F.from_int(int(m.group(1))) if m.group(1) else F.one
            e = int(m.group(2) or 1)
        else:
            c = parse_fq(F, part)
            e = 0
        items[e] = F.add(items.get(e, F.zero), c)
    if not items:
        raise ConfigError("empty pi-expansion")
    lo, hi = min(items), max(items)
    return Laurent(F, lo, [items.get(e, F.zero) for e in range(lo, hi + 1)])
