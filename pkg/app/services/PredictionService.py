import logging

from pydantic import ValidationError

from app.data.masking import mask_missing
from app.data.tags import encode_tag
from app.exceptions.CustomExceptions import ContractError, SchemaError
from app.models.TateModel import TateModel
from app.schemas.data_schema import MODALITIES, MissingPattern, Segment
from app.schemas.prediction_schema import ModelInfo, PredictRequest, PredictResponse

logger = logging.getLogger(__name__)


class PredictionService:
    def __init__(self, model: TateModel):
        self.model = model

    def info(self) -> ModelInfo:
        return ModelInfo(
            kind="student",
            network=self.model.config,
            parameter_count=self.model.parameter_count(),
            trained=self.model.trained,
        )

    def predict(self, request: PredictRequest) -> PredictResponse:
        """Classify one segment whose declared missing modalities are zero-masked"""
        try:
            segment = Segment(
                id=request.id,
                label=0,
                visual=request.visual,
                acoustic=request.acoustic,
                textual=request.textual,
            )
        except ValidationError as exc:
            raise SchemaError(f"invalid segment: {exc.errors()[0]['msg']}") from None
        self.model.check_widths(*(segment.width(m) for m in MODALITIES))

        declared = set(request.missing) | set(self.model.config.disabled)
        try:
            pattern = MissingPattern(missing=frozenset(declared))
        except ValidationError:
            raise ContractError("at least one enabled modality must be present") from None
        masked = mask_missing(segment, pattern)

        probabilities = self.model.predict_proba([masked])[0]
        predicted = int(probabilities.argmax())
        logger.info(f"predicted class {predicted} for '{request.id}' (missing: {pattern.label()})")
        return PredictResponse(
            id=request.id,
            tag=encode_tag(pattern).as_string(),
            missing=pattern.ordered(),
            probabilities=[float(p) for p in probabilities],
            predicted=predicted,
        )
