#include "fatra/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fatra {

static const char* kMagic = "fatra-checkpoint v1";

void save_checkpoint(const FatraModel& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ContractError("cannot write checkpoint: " + path);
    f << kMagic << "\n";
    f << "dims " << m.dims.zeta << " " << m.dims.hidden << " " << m.dims.repr << " "
      << m.dims.cls_hidden << " " << m.dims.disc_hidden << " " << m.dims.gen_hidden
      << "\n";
    char buf[64];
    f << "lr";
    for (int k = 0; k < 4; ++k) {
        std::snprintf(buf, sizeof(buf), " %.17g", m.lr[k]);
        f << buf;
    }
    f << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", m.tau);
    f << "tau " << buf << "\n";
    for (int net = 0; net < 4; ++net) {
        for (int layer = 0; layer < 2; ++layer) {
            const Matrix& w = m.w[net][layer];
            f << "weights " << net << " " << layer << " " << w.rows() << " " << w.cols()
              << "\n";
            for (std::size_t i = 0; i < w.rows(); ++i) {
                for (std::size_t j = 0; j < w.cols(); ++j) {
                    std::snprintf(buf, sizeof(buf), "%.17g", w(i, j));
                    f << buf << (j + 1 == w.cols() ? "" : " ");
                }
                f << "\n";
            }
        }
    }
    if (!f) throw ContractError("checkpoint write failed: " + path);
}

FatraModel load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ContractError("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(f, line) || line != kMagic)
        throw ContractError("not a checkpoint file: " + path);

    FatraModel m;
    std::string tag;
    {
        f >> tag;
        if (tag != "dims") throw ContractError("checkpoint: expected dims");
        f >> m.dims.zeta >> m.dims.hidden >> m.dims.repr >> m.dims.cls_hidden >>
            m.dims.disc_hidden >> m.dims.gen_hidden;
    }
    {
        f >> tag;
        if (tag != "lr") throw ContractError("checkpoint: expected lr");
        for (int k = 0; k < 4; ++k) f >> m.lr[k];
    }
    {
        f >> tag;
        if (tag != "tau") throw ContractError("checkpoint: expected tau");
        f >> m.tau;
    }
    for (int net = 0; net < 4; ++net) {
        for (int layer = 0; layer < 2; ++layer) {
            std::size_t nid = 0;
            std::size_t lid = 0;
            std::size_t rows = 0;
            std::size_t cols = 0;
            f >> tag >> nid >> lid >> rows >> cols;
            if (!f || tag != "weights" || nid != static_cast<std::size_t>(net) ||
                lid != static_cast<std::size_t>(layer))
                throw ContractError("checkpoint: malformed weights header");
            Matrix w(rows, cols);
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (!(f >> w.data()[i]))
                    throw ContractError("checkpoint: truncated weight payload");
            }
            w.assert_finite("load_checkpoint");
            m.w[net][layer] = std::move(w);
            m.opt[net][layer] = AdamState(rows, cols);
        }
    }
    return m;
}

}  // namespace fatra
