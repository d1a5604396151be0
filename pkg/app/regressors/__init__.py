"""Regressor interface implementations."""
from app.regressors.base import RegressorInterface
from app.regressors.constant import ConstantRegressor, ZeroRegressor
from app.regressors.exponential import ExponentialAffineRegressor


def get_regressor(spec, agent: int, p: int, q_in: int) -> RegressorInterface:
    """Get the regressor for a 0-based agent index from a scenario regressor section."""
    kind = spec.kind.lower()
    if kind == "paper_phi":
        return ExponentialAffineRegressor(
            p=p, q_in=q_in, gamma=spec.gamma[agent], beta=spec.beta[agent], d=agent + 1
        )
    elif kind == "zero":
        return ZeroRegressor(p=p, q_in=q_in, m=spec.m)
    elif kind == "constant":
        return ConstantRegressor(p=p, value=spec.value)
    else:
        raise ValueError(f"Unknown regressor kind: {spec.kind}")


__all__ = [
    "RegressorInterface",
    "ConstantRegressor",
    "ZeroRegressor",
    "ExponentialAffineRegressor",
    "get_regressor",
]
