"""Simulation scenarios and their YAML configuration files.

A scenario file has an optional ``defaults`` mapping and a ``scenarios``
list::

    defaults:
      alpha: 0.05
      side: two-sided
      runs: 2000
      seed: 20210917
    scenarios:
      - name: n5-null
        n: [5, 5, 5, 5]
        sd: [1, 1, 1.4, 1.4]
        mu: [10, 10, 10, 10]
      - name: n5-common
        n: [5, 5, 5, 5]
        sd: [1, 1, 1.4, 1.4]
        sigma: 1.4
        mu: [10, 13, 13, 13]

Groups are drawn with their own ``sd`` unless a scenario sets ``sigma``,
a common error standard deviation for every group. ``sd`` then only
describes the design as published.

Scenario seeds not given explicitly are derived from the master seed and
the scenario's position in the file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from . import config
from .errors import ConfigurationError, ScenarioParseError
from .marginal import Sidedness

__all__ = [
    "Scenario",
    "scenario_table",
    "parse_scenarios",
    "bundled_table6",
    "derived_seed",
]

_TOP_KEYS = {"defaults", "scenarios"}
_DEFAULT_KEYS = {"alpha", "side", "runs", "seed"}
_SCENARIO_KEYS = _DEFAULT_KEYS | {"name", "n", "mu", "sd", "sigma"}


@dataclass(frozen=True)
class Scenario:
    """One simulated design.

    Attributes
    ----------
    n : `tuple` of `int`
        Group sizes, control first.
    mu : `tuple` of `float`
        True group means.
    sd : `tuple` of `float`
        True group standard deviations.
    alpha : `float`
        Test level.
    side : `Sidedness`
        Direction of the alternatives.
    runs : `int`
        Number of simulated datasets.
    seed : `int`
        Seed of the scenario's random streams.
    name : `str`
        Display name.
    sigma : `float`, optional
        Common error standard deviation. If set, every group is drawn
        with it instead of its own ``sd``.
    """

    n: Tuple[int, ...]
    mu: Tuple[float, ...]
    sd: Tuple[float, ...]
    alpha: float = 0.05
    side: Sidedness = Sidedness.TWO_SIDED
    runs: int = 2000
    seed: int = config.seed
    name: str = ""
    sigma: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        object.__setattr__(self, "mu", tuple(float(x) for x in self.mu))
        object.__setattr__(self, "sd", tuple(float(x) for x in self.sd))
        if self.sigma is not None:
            object.__setattr__(self, "sigma", float(self.sigma))
        problem = _problem(
            self.n,
            self.mu,
            self.sd,
            self.alpha,
            self.runs,
            self.seed,
            self.sigma,
        )
        if problem is not None:
            field, message = problem
            raise ConfigurationError(f"{field}: {message}")

    @property
    def k(self) -> int:
        return len(self.n) - 1

    @property
    def error_sd(self) -> Tuple[float, ...]:
        """Standard deviations the groups are drawn with."""
        if self.sigma is None:
            return self.sd
        return (self.sigma,) * len(self.n)

    @property
    def true_nulls(self) -> Tuple[int, ...]:
        """Treatments whose mean equals the control mean."""
        return tuple(
            i for i in range(1, len(self.mu)) if self.mu[i] == self.mu[0]
        )

    @property
    def fwer_type(self) -> str:
        """``weak`` under the global null, ``power`` when every treatment
        differs from the control, ``strong`` otherwise.
        """
        nulls = len(self.true_nulls)
        if nulls == self.k:
            return "weak"
        if nulls == 0:
            return "power"
        return "strong"

    def with_runs(self, runs: int) -> Scenario:
        return replace(self, runs=runs)


def _problem(
    n: Sequence[int],
    mu: Sequence[float],
    sd: Sequence[float],
    alpha: float,
    runs: int,
    seed: int,
    sigma: Optional[float] = None,
) -> Optional[Tuple[str, str]]:
    """Return ``(field, message)`` for the first invalid field."""
    if len(n) < 2:
        return "n", "at least two groups are required"
    if any(x < 2 for x in n):
        return "n", "every group needs at least 2 observations"
    if len(mu) != len(n):
        return "mu", f"expected {len(n)} means, got {len(mu)}"
    if not all(math.isfinite(x) for x in mu):
        return "mu", "means must be finite"
    if len(sd) != len(n):
        return "sd", f"expected {len(n)} values, got {len(sd)}"
    if not all(math.isfinite(x) and x > 0 for x in sd):
        return "sd", "standard deviations must be positive"
    if sigma is not None and not (math.isfinite(sigma) and sigma > 0):
        return "sigma", "the common standard deviation must be positive"
    if not 0 < alpha < 1:
        return "alpha", f"{alpha} is not in (0, 1)"
    if runs < 1:
        return "runs", "at least one run is required"
    if seed < 0:
        return "seed", "seeds must be nonnegative"
    return None


class _Located(dict):
    """A mapping that remembers the line of itself and of each key."""

    line: int = 0
    lines: Dict[str, int] = {}


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_located(loader: _LineLoader, node: yaml.MappingNode) -> Any:
    mapping = _Located(loader.construct_mapping(node, deep=True))
    mapping.line = node.start_mark.line + 1
    mapping.lines = {
        str(key.value): key.start_mark.line + 1 for key, _ in node.value
    }
    return mapping


_LineLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_located
)


def _line(mapping: _Located, field: str) -> int:
    return mapping.lines.get(field, mapping.line)


def _fail(mapping: _Located, field: str, message: str) -> ScenarioParseError:
    return ScenarioParseError(message, line=_line(mapping, field), field=field)


def _check_keys(mapping: _Located, allowed: set, where: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise _fail(mapping, str(key), f"unknown key in {where}")


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _vector(mapping: _Located, field: str, integer: bool) -> List[Any]:
    if field not in mapping:
        raise ScenarioParseError(
            "required field is missing", line=mapping.line, field=field
        )
    value = mapping[field]
    if not isinstance(value, list) or not value:
        raise _fail(mapping, field, "expected a nonempty list")
    for item in value:
        if integer and (
            not isinstance(item, int) or isinstance(item, bool)
        ):
            raise _fail(mapping, field, f"{item!r} is not an integer")
        if not integer and not _is_number(item):
            raise _fail(mapping, field, f"{item!r} is not a number")
    return value


def _settings(mapping: _Located, base: Dict[str, Any]) -> Dict[str, Any]:
    settings = dict(base)
    if "alpha" in mapping:
        if not _is_number(mapping["alpha"]):
            raise _fail(mapping, "alpha", "expected a number")
        settings["alpha"] = float(mapping["alpha"])
    if "side" in mapping:
        try:
            settings["side"] = Sidedness.parse(str(mapping["side"]))
        except ValueError:
            raise _fail(
                mapping, "side", f"unknown sidedness {mapping['side']!r}"
            )
    for field in ("runs", "seed"):
        if field in mapping:
            value = mapping[field]
            if not isinstance(value, int) or isinstance(value, bool):
                raise _fail(mapping, field, "expected an integer")
            settings[field] = value
    return settings


def derived_seed(master: int, index: int) -> int:
    """Seed of the scenario at position ``index`` under a master seed."""
    sequence = np.random.SeedSequence(master, spawn_key=(index,))
    return int(sequence.generate_state(1)[0])


def parse_scenarios(text: str) -> List[Scenario]:
    """Parse a scenario document.

    Raises
    ------
    dunnettctp.errors.ScenarioParseError
        Raised with line and field information for malformed documents.
    """
    try:
        document = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioParseError(
            str(getattr(e, "problem", None) or e), line=line
        )
    if document is None:
        return []
    if not isinstance(document, _Located):
        raise ScenarioParseError("the document must be a mapping", line=1)
    _check_keys(document, _TOP_KEYS, "document")

    base: Dict[str, Any] = {
        "alpha": 0.05,
        "side": Sidedness.TWO_SIDED,
        "runs": 2000,
        "seed": config.seed,
    }
    defaults = document.get("defaults")
    if defaults is not None:
        if not isinstance(defaults, _Located):
            raise _fail(document, "defaults", "expected a mapping")
        _check_keys(defaults, _DEFAULT_KEYS, "defaults")
        base = _settings(defaults, base)
    master = base.pop("seed")

    entries = document.get("scenarios")
    if entries is None:
        return []
    if not isinstance(entries, list):
        raise _fail(document, "scenarios", "expected a list")

    scenarios = []
    for index, entry in enumerate(entries):
        if not isinstance(entry, _Located):
            raise _fail(document, "scenarios", f"entry {index} is not a map")
        _check_keys(entry, _SCENARIO_KEYS, "scenario")
        settings = _settings(entry, dict(base, seed=None))
        seed = settings.pop("seed")
        if seed is None:
            seed = derived_seed(master, index)
        name = str(entry.get("name", f"scenario-{index + 1}"))
        n = _vector(entry, "n", integer=True)
        mu = _vector(entry, "mu", integer=False)
        sd = _vector(entry, "sd", integer=False)
        sigma = entry.get("sigma")
        if sigma is not None and not _is_number(sigma):
            raise _fail(entry, "sigma", "expected a number")
        problem = _problem(
            n, mu, sd, settings["alpha"], settings["runs"], seed, sigma
        )
        if problem is not None:
            raise _fail(entry, *problem)
        scenarios.append(
            Scenario(
                n=tuple(n),
                mu=tuple(mu),
                sd=tuple(sd),
                seed=seed,
                name=name,
                sigma=sigma,
                **settings,
            )
        )
    return scenarios


def scenario_table(path: Union[str, Path]) -> List[Scenario]:
    """Read the scenarios of a YAML configuration file, in file order."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigurationError(f"cannot read {path}: {e.strerror}")
    return parse_scenarios(text)


def bundled_table6() -> List[Scenario]:
    """Scenarios of the bundled many-to-one power study (49 designs)."""
    text = (
        resources.files("dunnettctp")
        .joinpath("data/table6.yaml")
        .read_text()
    )
    return parse_scenarios(text)
