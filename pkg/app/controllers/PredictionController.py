from fastapi import Depends

from app.schemas.prediction_schema import ModelInfo, PredictRequest, PredictResponse
from app.services.PredictionService import PredictionService
from app.utils.dependencies import get_prediction_service


class PredictionController:
    @staticmethod
    async def get_model_info(
        service: PredictionService = Depends(get_prediction_service),
    ) -> ModelInfo:
        """Describe the served network"""
        return service.info()

    @staticmethod
    async def predict(
        request: PredictRequest,
        service: PredictionService = Depends(get_prediction_service),
    ) -> PredictResponse:
        """Classify one segment"""
        return service.predict(request)
