"""Shared fixtures: the default workbench, one taught trajectory, and one
trained policy, each built once per session."""

import numpy as np
import pytest

from tendbench.config import WorkbenchConfig
from tendbench.evaluation import ExecutionArtifacts
from tendbench.rl import InsertionTask, train
from tendbench.teaching import ScriptedDemonstrator, TeachingRig, default_demo_waypoints, run_scripted_teaching

ACCEPTANCE_SEED = 7


@pytest.fixture(scope="session")
def workbench():
    return WorkbenchConfig()


@pytest.fixture(scope="session")
def taught(workbench):
    rig = TeachingRig(camera=workbench.camera, box=workbench.box,
                      servo_gain=workbench.teaching.servo_gain,
                      rng=np.random.default_rng(0))
    script = ScriptedDemonstrator(default_demo_waypoints(workbench.scene))
    return run_scripted_teaching(rig, script,
                                 servo_height=workbench.teaching.servo_height,
                                 servo_dt=workbench.teaching.servo_dt,
                                 settle_time=workbench.teaching.settle_time)


@pytest.fixture(scope="session")
def trained(workbench, taught):
    task = InsertionTask(scene=workbench.scene, learner=workbench.learner,
                         target_true=taught.final_pose, gains=workbench.gains,
                         box=workbench.box)
    return train(task, workbench.learner, seed=ACCEPTANCE_SEED)


@pytest.fixture(scope="session")
def execution_artifacts(workbench, taught, trained):
    return ExecutionArtifacts(
        scene=workbench.scene, learner=workbench.learner, gains=workbench.gains,
        box=workbench.box, spiral=workbench.spiral,
        trajectory=taught.session.trajectory, final_pose=taught.final_pose,
        grasp_pose=taught.session.grasp_pose, observe_pose=taught.session.observe_pose,
        policy=trained.network,
        replay_force_stop=workbench.execution.replay_force_stop,
    )
