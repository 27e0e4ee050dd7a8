"""Estimation API routes: integrated and spot (co-)volatility from posted ticks."""

import logging
from typing import List

from fastapi import APIRouter, HTTPException

from ..models import TickSeries
from ..models.schemas import (
    IntegratedRequest,
    IntegratedResponse,
    SeriesIn,
    SpotCurveOut,
    SpotRequest,
    SpotResponse,
)
from ..services.errors import FourierVolError
from ..services.pipeline import estimate_integrated, estimate_spot

router = APIRouter()


def _ticks(series: List[SeriesIn]) -> List[TickSeries]:
    return [TickSeries(asset_id=s.asset_id, times=s.times, log_prices=s.log_prices) for s in series]


def domain_error(e: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail={"error": str(e), "type": type(e).__name__})


def internal_error(e: Exception, what: str) -> HTTPException:
    logging.exception(f"Error in {what}")
    return HTTPException(status_code=500, detail={"error": str(e), "type": type(e).__name__})


@router.post('/integrated', response_model=IntegratedResponse)
def post_integrated(payload: IntegratedRequest):
    """Integrated (co-)volatility for every pair of the posted series."""
    try:
        estimates = estimate_integrated(_ticks(payload.series), payload.window, payload.cutoff, payload.variant)
    except FourierVolError as e:
        raise domain_error(e)
    except Exception as e:
        raise internal_error(e, "integrated estimate")
    return IntegratedResponse(variant=payload.variant, estimates=estimates)


@router.post('/spot', response_model=SpotResponse)
def post_spot(payload: SpotRequest):
    """Spot curves on an even grid of [0, 2pi), mapped back to the raw clock."""
    try:
        curves = estimate_spot(
            _ticks(payload.series),
            payload.window,
            payload.cutoff,
            payload.spot_cutoff,
            payload.variant,
            payload.grid_size,
        )
    except FourierVolError as e:
        raise domain_error(e)
    except Exception as e:
        raise internal_error(e, "spot estimate")
    return SpotResponse(curves=[
        SpotCurveOut(
            asset_i=pc.asset_i,
            asset_j=pc.asset_j,
            variant=pc.curve.variant,
            n_freq=pc.curve.n_freq,
            t_rescaled=pc.curve.grid.tolist(),
            t_raw=pc.t_raw.tolist(),
            values=pc.curve.values.tolist(),
        )
        for pc in curves
    ])
