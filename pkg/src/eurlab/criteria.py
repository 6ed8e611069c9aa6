"""Entanglement and steering criteria built from joint Shannon entropies.

Each function returns a :class:`CriterionReport`. A report is *violated*
when its left-hand side falls below the threshold by more than 1e-9, which
certifies the corresponding form of entanglement (or steering). A
satisfied report allows no conclusion.

Criterion ids:

========  ==============================================================
prop1     sum_i H(A_i,B_i) >= f(A) + f(B)                (separability)
prop2     prop1 + max(S(rho_A), S(rho_B))                (separability)
prop3     sum_j H(V_1^j..V_n^j) >= sum_i f(V_i)          (full separability)
prop4     prop3 + max_i S(rho_i)                         (full separability)
prop5     sum_j H(A_j,B_j,C_j) >= 5/3 F1 + 1/3 F2        (biseparability)
prop6     prop5 + 1/3 sum_X S(rho_X)                     (biseparability)
steer_*   sum_i H(B_i|A_i) >= f(B), or mirrored          (no steering)
========  ==============================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bounds import multi_observable_bound, scenario_bounds
from .entropy import born_distribution, shannon_entropy
from .errors import DomainError
from .observables import ObservableScenario
from .states import marginal_entropies

VERDICT_TOL = 1e-9

CRITERION_IDS = ("prop1", "prop2", "prop3", "prop4", "prop5", "prop6", "steer_a_to_b", "steer_b_to_a")


@dataclass(frozen=True)
class CriterionReport:
    criterion_id: str
    lhs: float
    threshold: float
    components: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.lhs - self.threshold

    @property
    def violated(self) -> bool:
        return self.margin < -VERDICT_TOL

    @property
    def verdict(self) -> str:
        return "violated" if self.violated else "satisfied"

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion_id,
            "lhs": self.lhs,
            "threshold": self.threshold,
            "margin": self.margin,
            "verdict": self.verdict,
            "components": dict(self.components),
        }

    def __str__(self):
        return (
            f"{self.criterion_id}: lhs {self.lhs:.9f} threshold {self.threshold:.9f} "
            f"margin {self.margin:+.9f} {self.verdict.upper()}"
        )


def _check_sites(state, scenario: ObservableScenario):
    if tuple(state.dims) != scenario.dims:
        raise DomainError(f"state dims {tuple(state.dims)} do not match scenario dims {scenario.dims}")


def _joint_entropies(state, scenario: ObservableScenario) -> list[float]:
    return [shannon_entropy(born_distribution(state, s)) for s in scenario.settings()]


def _site_bounds(scenario: ObservableScenario) -> list[float]:
    return [float(multi_observable_bound(site).value) for site in scenario.per_site_bases]


def _entropy_components(hs: list[float]) -> dict:
    return {f"H{j + 1}": h for j, h in enumerate(hs)}


def bipartite_criterion(state, scenario: ObservableScenario, state_dependent: bool = False) -> CriterionReport:
    """prop1 (or prop2 when ``state_dependent``) on a two-site state."""
    if scenario.n_sites != 2:
        raise DomainError(f"bipartite criterion needs 2 sites, scenario has {scenario.n_sites}")
    _check_sites(state, scenario)
    hs = _joint_entropies(state, scenario)
    f_a, f_b = _site_bounds(scenario)
    comps = _entropy_components(hs) | {"f_A": f_a, "f_B": f_b}
    threshold = f_a + f_b
    if state_dependent:
        s_a, s_b = marginal_entropies(state)
        comps |= {"S_A": s_a, "S_B": s_b}
        threshold += max(s_a, s_b)
    return CriterionReport("prop2" if state_dependent else "prop1", sum(hs), threshold, comps)


def full_separability_criterion(
    state, scenario: ObservableScenario, state_dependent: bool = False
) -> CriterionReport:
    """prop3 (or prop4) on an n-site state; violation means not fully separable."""
    if scenario.n_sites < 2:
        raise DomainError("full separability needs at least 2 sites")
    _check_sites(state, scenario)
    hs = _joint_entropies(state, scenario)
    fs = _site_bounds(scenario)
    comps = _entropy_components(hs) | {f"f_{k}": f for k, f in enumerate(fs)}
    threshold = sum(fs)
    if state_dependent:
        ss = marginal_entropies(state)
        comps |= {f"S_{k}": s for k, s in enumerate(ss)}
        threshold += max(ss)
    return CriterionReport("prop4" if state_dependent else "prop3", sum(hs), threshold, comps)


def gme_criterion(state, scenario: ObservableScenario, state_dependent: bool = False) -> CriterionReport:
    """prop5 (or prop6) on three sites of equal dimension measuring the same bases.

    Violation certifies genuine tripartite entanglement.
    """
    if scenario.n_sites != 3:
        raise DomainError(f"GME criterion is defined for 3 sites, scenario has {scenario.n_sites}")
    if len(set(scenario.dims)) != 1:
        raise DomainError(f"GME criterion needs equal site dimensions, got {scenario.dims}")
    _check_sites(state, scenario)
    sb = scenario_bounds(scenario.per_site_bases)
    hs = _joint_entropies(state, scenario)
    comps = _entropy_components(hs) | {"F1": sb.F1, "F2": sb.F2}
    threshold = 5.0 / 3.0 * sb.F1 + 1.0 / 3.0 * sb.F2
    if state_dependent:
        ss = marginal_entropies(state)
        comps |= {f"S_{k}": s for k, s in enumerate(ss)}
        threshold += sum(ss) / 3.0
    return CriterionReport("prop6" if state_dependent else "prop5", sum(hs), threshold, comps)


def steering_criterion(state, scenario: ObservableScenario, direction: str = "a_to_b") -> CriterionReport:
    """sum_i H(B_i|A_i) >= f(B) for ``a_to_b``; sites swapped for ``b_to_a``.

    Violation in direction a_to_b shows that A steers B.
    """
    if scenario.n_sites != 2:
        raise DomainError(f"steering criterion needs 2 sites, scenario has {scenario.n_sites}")
    if direction not in ("a_to_b", "b_to_a"):
        raise DomainError(f"direction must be a_to_b or b_to_a, got {direction!r}")
    _check_sites(state, scenario)
    conditioning = 0 if direction == "a_to_b" else 1
    conditioned = 1 - conditioning
    cond = []
    for setting in scenario.settings():
        dist = born_distribution(state, setting)
        cond.append(shannon_entropy(dist) - shannon_entropy(dist.marginal([conditioning])))
    threshold = _site_bounds(scenario)[conditioned]
    comps = {f"Hcond{j + 1}": h for j, h in enumerate(cond)} | {"f": threshold}
    return CriterionReport(f"steer_{direction}", sum(cond), threshold, comps)


def evaluate(criterion_id: str, state, scenario: ObservableScenario) -> CriterionReport:
    """Dispatch on a criterion id."""
    table = {
        "prop1": lambda: bipartite_criterion(state, scenario, False),
        "prop2": lambda: bipartite_criterion(state, scenario, True),
        "prop3": lambda: full_separability_criterion(state, scenario, False),
        "prop4": lambda: full_separability_criterion(state, scenario, True),
        "prop5": lambda: gme_criterion(state, scenario, False),
        "prop6": lambda: gme_criterion(state, scenario, True),
        "steer_a_to_b": lambda: steering_criterion(state, scenario, "a_to_b"),
        "steer_b_to_a": lambda: steering_criterion(state, scenario, "b_to_a"),
    }
    if criterion_id not in table:
        raise DomainError(f"unknown criterion {criterion_id!r}; expected one of {CRITERION_IDS}")
    return table[criterion_id]()


# Named inequalities used for the qubit and qudit examples: each maps to a
# criterion id and the basis names measured on every site.
NAMED_CRITERIA = {
    "criterio1": ("prop2", ("Z", "X")),
    "criterio2": ("prop1", ("Z", "X", "Y")),
    "criterio3": ("prop2", ("Z", "X", "Y")),
    "multi_ent1": ("prop3", ("Z", "X", "Y")),
    "multi_ent2": ("prop4", ("Z", "X", "Y")),
    "gen_ent1": ("prop5", ("Z", "X", "Y")),
    "gen_ent2": ("prop6", ("Z", "X", "Y")),
    "qudit": ("prop2", ("comp", "fourier")),
}
