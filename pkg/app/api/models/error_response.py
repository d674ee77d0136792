"""
ErrorResponse data model
"""
from typing import Any, Dict, Optional


class ErrorResponse:
    """JSON body of a failed /apply or /verify request"""

    def __init__(self, error: str = "", message: str = "", detail: Optional[Dict[str, Any]] = None):
        self.error = error
        self.message = message
        self.detail = detail

    def to_dict(self) -> Dict[str, Any]:
        data = {'error': self.error, 'message': self.message}
        if self.detail:
            data['detail'] = self.detail
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ErrorResponse':
        return cls(
            error=data.get('error', ''),
            message=data.get('message', ''),
            detail=data.get('detail')
        )
