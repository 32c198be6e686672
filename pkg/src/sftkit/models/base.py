from pydantic import BaseModel, ConfigDict


class SftModel(BaseModel):
    """Immutable base model shared by all sftkit value types."""

    model_config = ConfigDict(
        frozen=True,
        arbitrary_types_allowed=True,
        populate_by_name=True,
    )

    def to_json_dict(self) -> dict:
        """Dump to plain JSON types using field aliases."""
        return self.model_dump(mode="json", by_alias=True)
