"""
Services module exports
"""

from services.bayes_service import create_bayes_service
from services.design_service import create_design_service
from services.model_service import create_model_service
from services.problem_file_service import create_problem_file_service
from services.report_service import create_report_service
from services.voi_service import create_voi_service

__all__ = [
    "create_bayes_service",
    "create_design_service",
    "create_model_service",
    "create_problem_file_service",
    "create_report_service",
    "create_voi_service",
]
