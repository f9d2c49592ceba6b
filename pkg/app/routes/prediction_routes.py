from fastapi import APIRouter, Depends, status

from app.controllers.PredictionController import PredictionController
from app.schemas.prediction_schema import ModelInfo, PredictRequest, PredictResponse
from app.services.PredictionService import PredictionService
from app.utils.dependencies import get_prediction_service

router = APIRouter(tags=["Prediction"])


@router.get(
    "/model",
    response_model=ModelInfo,
    status_code=status.HTTP_200_OK,
    summary="Served Network",
    description="Configuration and parameter count of the loaded student network",
)
async def get_model_info(service: PredictionService = Depends(get_prediction_service)):
    return await PredictionController.get_model_info(service)


@router.post(
    "/predict",
    response_model=PredictResponse,
    status_code=status.HTTP_200_OK,
    summary="Classify Segment",
    description="Classify one segment, zero-masking the modalities declared missing",
)
async def predict(
    request: PredictRequest,
    service: PredictionService = Depends(get_prediction_service),
):
    """
    Classify one segment.

    - **visual**, **acoustic**, **textual**: feature sequences, one row per timestep
    - **missing**: up to two modalities to treat as absent

    Returns the tag, class probabilities and the predicted class.
    """
    return await PredictionController.predict(request, service)
