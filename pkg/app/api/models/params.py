"""
Parameter models validated with pydantic
"""
from itertools import combinations
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class QuadratureSpec(BaseModel):
    """Quadrature rule applied after the substitution x = e^u"""
    rule: Literal["trapezoid", "tanh-sinh"] = "trapezoid"
    points: int = Field(default=32, ge=16)
    tol: float = Field(default=1e-8, ge=1e-12)
    log_substitution: bool = True
    window: float = Field(default=5.0, gt=0)
    max_refinements: int = Field(default=3, ge=0)

    def halved(self) -> 'QuadratureSpec':
        """Same rule with the step size halved"""
        return self.model_copy(update={'points': 2 * self.points - 1})


class MeasureParams(BaseModel):
    """Parameters of the three random-weight models"""
    model: Literal["rect", "sym", "tri"]
    theta_hat: Optional[List[float]] = None
    theta: Optional[List[float]] = None
    s: float = 1.0
    alpha: Optional[List[float]] = None
    zeta: Optional[float] = None

    @model_validator(mode='after')
    def check_region(self) -> 'MeasureParams':
        if self.model == "rect":
            if not self.theta_hat or not self.theta:
                raise ValueError("rect model needs theta_hat and theta")
            if self.s <= 0:
                raise ValueError("rect model needs s > 0")
            if any(a + b <= 0 for a in self.theta_hat for b in self.theta):
                raise ValueError("rect model needs theta_hat_i + theta_j > 0")
        else:
            if not self.alpha:
                raise ValueError(f"{self.model} model needs alpha")
            if any(a + b <= 0 for a, b in combinations(self.alpha, 2)):
                raise ValueError("alpha_i + alpha_j must be positive for i != j")
            if self.model == "sym":
                if self.zeta is None:
                    raise ValueError("sym model needs zeta")
                if any(a + self.zeta <= 0 for a in self.alpha):
                    raise ValueError("sym model needs alpha_i + zeta > 0")
            elif len(self.alpha) < 2:
                raise ValueError("tri model needs n >= 2")
        return self

    @property
    def n(self) -> int:
        return len(self.theta_hat) if self.model == "rect" else len(self.alpha)

    @property
    def m(self) -> int:
        return len(self.theta) if self.model == "rect" else len(self.alpha)
