from .plan import PricingPlan, CertificateReport, check_certificate
from .structured import solve_lp, solve_lp_avg, RowPlan
from .reference import solve_lp_reference

__all__ = [
    "PricingPlan", "CertificateReport", "check_certificate",
    "solve_lp", "solve_lp_avg", "RowPlan", "solve_lp_reference",
]
