"""Study API routes: list presets and run small Monte Carlo studies."""

import asyncio

from fastapi import APIRouter, HTTPException
from pydantic import ValidationError

from ..models.schemas import ExperimentReport, StudyRunRequest
from ..services.errors import FourierVolError
from ..services.experiments import parse_study_config, run_study
from ..services.presets import get_preset, list_presets
from .estimate import domain_error, internal_error

router = APIRouter()

MAX_REPLICATIONS = 200


@router.get('/presets')
def get_presets():
    return {"presets": list_presets()}


@router.post('/run', response_model=ExperimentReport)
async def post_run(payload: StudyRunRequest):
    """Run a preset or inline config in a worker thread.

    The replication count is capped so a request cannot tie up the server.
    """
    try:
        config = get_preset(payload.preset) if payload.preset else dict(payload.config)
        if payload.replications is not None:
            config["replications"] = payload.replications
        if payload.seed is not None:
            config["seed"] = payload.seed
        cfg = parse_study_config(config)
        if cfg.replications > MAX_REPLICATIONS:
            raise HTTPException(status_code=422, detail={
                "error": f"at most {MAX_REPLICATIONS} replications per request, got {cfg.replications}",
                "type": "ConfigError",
            })
        return await asyncio.to_thread(run_study, cfg)
    except HTTPException:
        raise
    except (FourierVolError, ValidationError) as e:
        raise domain_error(e)
    except Exception as e:
        raise internal_error(e, "study run")
