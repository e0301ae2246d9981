import math

from pydantic import BaseModel, Field


class ProblemConstants(BaseModel):
    """
    Certified constants of a loss problem over the mixture simplex.
    nu1, rho, nu2, rho2 describe the geometric decay of optimal-model
    distances across partition heights.
    """
    mu: float
    beta: float
    L: float
    Gcal: float
    kappa: float
    sigma: float
    nu1: float
    nu2: float
    rho: float
    rho2: float
    K: int = Field(default=1)

    @classmethod
    def from_moduli(cls, mu: float, beta: float, L: float, Gcal: float, sigma: float,
                    K: int) -> "ProblemConstants":
        nu1 = (4.0 * sigma * math.sqrt(2.0 * K) / (math.sqrt(3.0) * mu)) ** 2
        # a single source has nothing to partition; its decay rate is taken as for K=2
        rho = (math.sqrt(3.0) / 2.0) ** (2.0 / max(K - 1, 1))
        return cls(mu=mu, beta=beta, L=L, Gcal=Gcal, kappa=beta / mu, sigma=sigma,
                   nu1=nu1, nu2=L * math.sqrt(nu1), rho=rho, rho2=math.sqrt(rho), K=K)
