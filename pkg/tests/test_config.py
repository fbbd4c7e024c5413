import pytest

from fraclt.core.functions import CompactBump
from fraclt.core.types import FunctionId, ProcessKind, SamplerType
from fraclt.exceptions import ConfigurationError, ValidationError
from fraclt.processors.input import ConfigProcessor

EXPERIMENT = """
# reference experiment
[process]
kind = rl
tau = 0.7
horizon = 2
n_steps = 256
sampler = kernel_conv

[function]
id = compact_bump
params = 2, 0.5

[experiment]
replicates = 40
seed = 255
lambda_ladder = 1, 2, 8
output_dir = run1
write_field = yes

[verify]
checks = constants, additivity
nu = 0.1
rate_window = 5, 500
scale_lambdas = 2
"""


@pytest.fixture
def processor():
    return ConfigProcessor(environ={})


class TestParse:
    def test_sections(self, processor):
        raw = processor.parse(EXPERIMENT)
        assert raw["process"]["kind"] == "rl"
        assert raw["function"]["params"] == "2, 0.5"
        assert raw["verify"]["checks"] == "constants, additivity"

    @pytest.mark.parametrize("text", [
        "[telemetry]\nport = 1\n",
        "tau = 0.5\n",
        "[process]\nhurst = 0.5\n",
        "[process]\ntau\n",
    ])
    def test_rejections(self, processor, text):
        with pytest.raises(ConfigurationError):
            processor.parse(text)

    def test_missing_file(self, processor, tmp_path):
        with pytest.raises(ConfigurationError):
            processor.read(tmp_path / "absent.cfg")


class TestBuild:
    def test_full_file(self, processor, tmp_path):
        path = tmp_path / "experiment.cfg"
        path.write_text(EXPERIMENT, encoding="utf-8")
        config = processor.load(path)
        assert config.process.kind == ProcessKind.RL
        assert config.process.tau == 0.7
        assert config.process.horizon == 2.0
        assert config.process.sampler == SamplerType.KERNEL_CONV
        assert config.function_id == FunctionId.COMPACT_BUMP
        assert config.make_function().params == (2.0, 0.5, 1.0)
        assert config.master_seed == 255
        assert config.lambda_ladder == (1.0, 2.0, 8.0)
        assert config.write_field is True
        assert config.checks == ("constants", "additivity")
        assert config.verify.nu == 0.1
        assert config.verify.rate_window == (5.0, 500.0)
        assert config.verify.scale_lambdas == (2.0,)
        assert config.verify.n_boot == 1000

    def test_defaults(self, processor):
        config = processor.build({})
        assert config.process.kind == ProcessKind.FBM
        assert config.process.tau == 0.5
        assert config.process.n_steps == 1024
        assert config.process.sampler == SamplerType.CHOLESKY
        assert config.replicates == 1
        assert config.threads == 1
        assert config.verify.nu_for(0.5) == pytest.approx(0.25)

    def test_limit_functional(self, processor):
        default = processor.build({}).verify.make_limit_function()
        assert isinstance(default, CompactBump)
        assert default.support() == pytest.approx((-0.3, 0.3))
        raw = processor.parse("[verify]\nlimit_function = gaussian_bump\nlimit_params = 1, 0, 0.2\n")
        assert processor.build(raw).verify.make_limit_function().params == (1.0, 0.0, 0.2)

    def test_precedence(self):
        processor = ConfigProcessor(environ={"FRACLT_THREADS": "3", "FRACLT_OUTPUT_DIR": "from-env"})
        assert processor.build({}).threads == 3
        assert processor.build({}).output_dir == "from-env"
        raw = processor.parse("[experiment]\nthreads = 5\n")
        assert processor.build(raw).threads == 5
        assert processor.build(raw, {"threads": 7, "replicates": None}).threads == 7

    def test_cap_from_environment(self):
        processor = ConfigProcessor(environ={"FRACLT_CHOLESKY_CAP": "128"})
        with pytest.raises(ConfigurationError):
            processor.build(processor.parse("[process]\nn_steps = 256\n"))


class TestValidate:
    @pytest.mark.parametrize("text", [
        "[process]\nsampler = circulant\nn_steps = 100\n",
        "[process]\nn_steps = 4096\n",
        "[experiment]\nreplicates = 0\n",
        "[experiment]\nthreads = 0\n",
        "[experiment]\nlambda_ladder = 2, 4\n",
        "[experiment]\nlambda_ladder = 1, 4, 4\n",
        "[experiment]\nseed = -1\n",
        "[experiment]\nwrite_paths = maybe\n",
        "[verify]\nchecks = constants, telepathy\n",
        "[verify]\nrate_window = 100, 10\n",
        "[verify]\nscale_lambdas = 4, -1\n",
        "[function]\nid = combination\n",
        "[function]\nid = sawtooth\n",
        "[function]\nid = gaussian_bump\nparams = 1, 0, -1\n",
        "[verify]\nlimit_function = signed_difference\n",
        "[verify]\nlimit_params = 1, 0, 0\n",
        "[process]\ntau = half\n",
    ])
    def test_configuration_errors(self, processor, text):
        with pytest.raises(ConfigurationError):
            processor.build(processor.parse(text))

    @pytest.mark.parametrize("text", [
        "[process]\nkind = ou\n",
        "[process]\ntau = 1.5\n",
        "[process]\nkind = rl\nsampler = circulant\nn_steps = 64\n",
    ])
    def test_invalid_processes(self, processor, text):
        with pytest.raises(ValidationError):
            processor.build(processor.parse(text))
