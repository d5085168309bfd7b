"""Molecular species: constants, builtin table, and TOML data files.

Data file grammar (UTF-8 TOML). One ``[[molecule]]`` table per species::

    [[molecule]]
    name = "RbCs"            # required, case-sensitive
    b_rot_cm1 = 1.65e-2      # rotational constant, cm^-1 (optional)
    mu_debye = 1.21          # permanent dipole, Debye (required)
    omega_vib_cm1 = 49.4     # vibrational wavenumber, cm^-1 (optional)

Missing optional fields leave the species *incomplete*; anything that needs
them raises :class:`IncompleteParametersError` instead of guessing.
"""

from dataclasses import dataclass
import math
import re
import sys
import warnings

from .errors import IncompleteParametersError, RegistryParseError, RegistryValidationError
from .units import debye_to_si, wavenumber_to_angular_frequency, wavenumber_to_energy

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FIELDS = ("name", "b_rot_cm1", "mu_debye", "omega_vib_cm1")


@dataclass(frozen=True)
class MoleculeParams:
    """Spectroscopic constants of one diatomic species.

    ``b_rot`` and ``omega_vib`` are wavenumbers in cm^-1, ``mu`` is in Debye.
    """

    name: str
    b_rot: float | None
    mu: float
    omega_vib: float | None = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise RegistryValidationError("name must be a non-empty string", "name")
        for attr, field in (("b_rot", "b_rot_cm1"), ("mu", "mu_debye"), ("omega_vib", "omega_vib_cm1")):
            value = getattr(self, attr)
            if value is None and attr != "mu":
                continue
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise RegistryValidationError(f"{self.name}: {field} must be a finite number", field)
            if value <= 0:
                raise RegistryValidationError(f"{self.name}: {field} must be > 0, got {value}", field)
        if self.b_rot is not None and self.omega_vib is not None and self.b_rot >= self.omega_vib:
            warnings.warn(
                f"{self.name}: b_rot ({self.b_rot}) is not small compared to omega_vib ({self.omega_vib})",
                stacklevel=3,
            )

    @property
    def complete(self):
        return self.b_rot is not None and self.omega_vib is not None

    def require(self, *attrs):
        missing = [a for a in attrs if getattr(self, a) is None]
        if missing:
            raise IncompleteParametersError(f"{self.name}: missing {', '.join(missing)}")
        return self

    # SI views
    @property
    def b_rot_joule(self):
        self.require("b_rot")
        return wavenumber_to_energy(self.b_rot)

    @property
    def mu_si(self):
        return debye_to_si(self.mu)

    @property
    def omega_vib_rad_s(self):
        self.require("omega_vib")
        return wavenumber_to_angular_frequency(self.omega_vib)

    def to_record(self):
        rec = {"name": self.name, "b_rot_cm1": self.b_rot, "mu_debye": self.mu, "omega_vib_cm1": self.omega_vib}
        return {k: v for k, v in rec.items() if v is not None}


# Six alkali dimers of the design table plus DCl (only the dipole is known).
_BUILTIN = (
    ("RbCs", 1.65e-2, 1.21, 49.4),
    ("KCs", 3.08e-2, 1.84, 66.2),
    ("KRb", 3.80e-2, 0.59, 75.5),
    ("NaCs", 5.88e-2, 4.58, 98.0),
    ("NaRb", 7.02e-2, 3.30, 107.0),
    ("NaK", 9.81e-2, 2.76, 124.1),
    ("DCl", None, 1.02, None),
)

ALKALI_DIMERS = tuple(row[0] for row in _BUILTIN[:6])


def builtin_registry():
    return [MoleculeParams(*row) for row in _BUILTIN]


def _line_of(text, index, field=None):
    """1-based line of the index-th ``[[molecule]]`` header, or of a field inside it."""
    lines = text.splitlines()
    headers = [i for i, ln in enumerate(lines) if re.match(r"\s*\[\[\s*molecule\s*\]\]", ln)]
    if index >= len(headers):
        return None
    start = headers[index]
    if field is None:
        return start + 1
    stop = headers[index + 1] if index + 1 < len(headers) else len(lines)
    pat = re.compile(rf"\s*{re.escape(field)}\s*=")
    for i in range(start, stop):
        if pat.match(lines[i]):
            return i + 1
    return start + 1


def load_registry(source):
    """Parse a molecule data document (TOML text) into validated records.

    Raises
    ------
    RegistryParseError
        Malformed TOML, unknown fields or wrong top-level layout. Carries the
        offending line and field where they can be determined.
    RegistryValidationError
        A record breaks a :class:`MoleculeParams` invariant.
    """
    try:
        doc = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        raise RegistryParseError(f"malformed molecule file: {exc}", line=line) from exc

    extra = set(doc) - {"molecule"}
    if extra:
        raise RegistryParseError("unexpected top-level key", field=sorted(extra)[0])
    records = doc.get("molecule", [])
    if not isinstance(records, list):
        raise RegistryParseError("'molecule' must be an array of tables ([[molecule]])", field="molecule")

    out = []
    seen = set()
    for i, rec in enumerate(records):
        unknown = set(rec) - set(FIELDS)
        if unknown:
            f = sorted(unknown)[0]
            raise RegistryParseError("unknown field", line=_line_of(source, i, f), field=f)
        for f in ("name", "mu_debye"):
            if f not in rec:
                raise RegistryParseError("missing required field", line=_line_of(source, i), field=f)
        try:
            params = MoleculeParams(
                name=rec["name"],
                b_rot=rec.get("b_rot_cm1"),
                mu=rec["mu_debye"],
                omega_vib=rec.get("omega_vib_cm1"),
            )
        except RegistryValidationError as exc:
            raise RegistryValidationError(f"{exc} (line {_line_of(source, i, exc.field)})", exc.field) from None
        if params.name in seen:
            raise RegistryParseError("duplicate species", line=_line_of(source, i, "name"), field="name")
        seen.add(params.name)
        out.append(params)
    return out


def dump_registry(records):
    """Serialize records to the TOML grammar accepted by :func:`load_registry`."""
    chunks = []
    for p in records:
        lines = ["[[molecule]]"]
        for key, value in p.to_record().items():
            lines.append(f"{key} = {_toml_value(value)}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def _toml_value(value):
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return repr(float(value))


def merge_registries(*registries):
    """Name -> params mapping; later registries shadow earlier ones."""
    merged = {}
    for reg in registries:
        for p in reg:
            merged[p.name] = p
    return merged


def lookup(name, registry=None):
    reg = merge_registries(builtin_registry()) if registry is None else registry
    if not isinstance(reg, dict):
        reg = merge_registries(reg)
    try:
        return reg[name]
    except KeyError:
        raise KeyError(f"unknown species {name!r}; known: {', '.join(sorted(reg))}") from None
