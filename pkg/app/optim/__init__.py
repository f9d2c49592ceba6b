from app.optim.adam import Adam, AdamState, adam_step

__all__ = ["Adam", "AdamState", "adam_step"]
