"""
System Models
Parameters of the two reference systems plus a linear map used for checks
"""

from typing import Annotated, Literal, Tuple, Union

from pydantic import Field, model_validator

from microinit.models.common import StrictModel


class LorenzParams(StrictModel):
    """Lorenz system integrated with fixed-step RK4"""
    kind: Literal["lorenz"] = "lorenz"
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    dt: float = Field(0.01, gt=0, description="Fixed RK4 step size")
    box_low: Tuple[float, float, float] = (-20.0, -25.0, 0.0)
    box_high: Tuple[float, float, float] = (20.0, 25.0, 45.0)
    burn_in: int = Field(5000, ge=1, description="Steps discarded when sampling the attractor")


class MackeyGlassParams(StrictModel):
    """Mackey-Glass delay equation discretized as an N_x-sample delay line"""
    kind: Literal["mackey_glass"] = "mackey_glass"
    a: float = 0.2
    b: float = 0.1
    c: float = 10.0
    t_d: float = Field(25.0, gt=0, description="Delay")
    n_x: int = Field(50, ge=1, description="Samples stored across one delay")
    box_low: float = 0.4
    box_high: float = 1.4
    burn_in: int = Field(5000, ge=1)

    @property
    def dt(self) -> float:
        return self.t_d / self.n_x

    @model_validator(mode="after")
    def _check_box(self):
        if self.box_low >= self.box_high:
            raise ValueError("box_low must be below box_high")
        return self


SystemParams = Annotated[
    Union[LorenzParams, MackeyGlassParams],
    Field(discriminator="kind"),
]
