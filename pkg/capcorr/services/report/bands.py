from typing import Dict, Optional, Union

from marshmallow import ValidationError

from capcorr import const
from capcorr import exceptions
from capcorr.services.base import schemas

HIGH = 'High'
MODERATE = 'Moderate'
LOW = 'Low'
NEGATIVE = 'Negative'
BANDS = [HIGH, MODERATE, LOW, NEGATIVE]


class BandThresholds(schemas.SchemaToObject):

    def __init__(self, json_data: Optional[Union[Dict, str]] = None):
        """Boundaries between capabilities-correlation bands

        High is rho >= high, Moderate is moderate <= rho < high, Negative is rho <= negative and Low is
        everything strictly between negative and moderate.

        Args:
            json_data: A dictionary (or JSON string) with the keys high, moderate and negative; defaults apply
                when omitted
        """
        self.high = const.HIGH_BAND_THRESHOLD
        self.moderate = const.MODERATE_BAND_THRESHOLD
        self.negative = const.NEGATIVE_BAND_THRESHOLD
        if json_data is None:
            json_data = self.to_dict()
        try:
            super().__init__(json_data, schemas.BandThresholdsSchema())
        except ValidationError as e:
            raise exceptions.InputError(f'invalid band thresholds; {schemas.format_validation_error(e)}')

    @classmethod
    def create(cls, high: Optional[float] = None, moderate: Optional[float] = None,
               negative: Optional[float] = None) -> 'BandThresholds':
        """Defaults with any of the three boundaries overridden"""
        return cls(dict(
            high=const.HIGH_BAND_THRESHOLD if high is None else high,
            moderate=const.MODERATE_BAND_THRESHOLD if moderate is None else moderate,
            negative=const.NEGATIVE_BAND_THRESHOLD if negative is None else negative
        ))

    def to_dict(self) -> Dict:
        return dict(high=self.high, moderate=self.moderate, negative=self.negative)

    def __repr__(self):
        return f'BandThresholds(high={self.high}, moderate={self.moderate}, negative={self.negative})'


def classify_band(rho: float, thresholds: Optional[BandThresholds] = None) -> str:
    """Place a capabilities correlation in its band
    Args:
        rho: A correlation in [-1, 1]
        thresholds: Band boundaries; defaults to 0.60 / 0.40 / -0.40
    Returns:
        One of High, Moderate, Low or Negative
    """
    if thresholds is None:
        thresholds = BandThresholds()
    try:
        rho = float(rho)
    except (TypeError, ValueError):
        raise exceptions.InputError(f'correlation must be a number, got {rho!r}')
    if not -1.0 <= rho <= 1.0:
        raise exceptions.InputError(f'correlation {rho} lies outside [-1, 1]')
    if rho >= thresholds.high:
        return HIGH
    elif rho >= thresholds.moderate:
        return MODERATE
    elif rho <= thresholds.negative:
        return NEGATIVE
    return LOW
