from app.models.BaseModel import BaseModel
from app.models.TateModel import TateModel, TateOutputs
from app.models.TeacherModel import TeacherModel

# Export all models
__all__ = ["BaseModel", "TateModel", "TateOutputs", "TeacherModel"]
