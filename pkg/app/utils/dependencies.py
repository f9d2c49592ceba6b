from functools import lru_cache

from fastapi import Depends

from app.models.TateModel import TateModel
from app.repositories.CheckpointRepository import CheckpointRepository
from app.services.PredictionService import PredictionService
from config.settings import settings


@lru_cache(maxsize=4)
def load_served_model(path: str) -> TateModel:
    """Student network behind the HTTP surface, loaded once per path"""
    return CheckpointRepository(path).load_student()


def get_model() -> TateModel:
    return load_served_model(settings.CHECKPOINT_PATH)


def get_prediction_service(model: TateModel = Depends(get_model)) -> PredictionService:
    return PredictionService(model)
