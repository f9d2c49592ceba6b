from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError

from app.exceptions.CustomExceptions import TateError
from app.exceptions.handlers import (
    general_exception_handler,
    tate_exception_handler,
    validation_exception_handler,
)
from app.middleware.cors import setup_cors
from app.routes import prediction_routes
from config.settings import settings

app = FastAPI(
    title=settings.APP_NAME,
    description="Missing-modality sentiment classification with a tag-assisted transformer encoder",
    version="1.0.0",
    debug=settings.APP_DEBUG,
)

setup_cors(app, settings)

# Register exception handlers
app.add_exception_handler(TateError, tate_exception_handler)  # type: ignore
app.add_exception_handler(RequestValidationError, validation_exception_handler)  # type: ignore
app.add_exception_handler(Exception, general_exception_handler)  # type: ignore

app.include_router(prediction_routes.router, prefix="/api")


@app.get("/health")
async def health_check():
    return {"status": "healthy", "checkpoint": settings.CHECKPOINT_PATH}


# Run with: tate serve  (or uvicorn main:app --host 127.0.0.1 --port 8000)
