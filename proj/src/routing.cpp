#include "toolsight/routing.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "toolsight/raster.hpp"

namespace toolsight {

namespace detail {
extern const char* const kTask1StrategyText;
extern const char* const kTask2StrategyText;
}  // namespace detail

std::vector<std::string> tool_subset(TaskKind task) {
    std::vector<std::string> core = {"draw_line", "draw_rectangle", "draw_circle", "crop",
                                     "compare_crops"};
    if (task == TaskKind::TaskII) {
        for (const char* t : {"overlay_grid", "extract_channel", "sample_color",
                              "isolate_color", "blur"})
            core.emplace_back(t);
    }
    return core;
}

const std::string& default_strategy_text(TaskKind task) {
    static const std::string t1 = detail::kTask1StrategyText;
    static const std::string t2 = detail::kTask2StrategyText;
    return task == TaskKind::TaskI ? t1 : t2;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void validate_table(TaskKind task, const std::vector<CategoryStrategy>& table) {
    const auto subset = tool_subset(task);
    for (const auto& cat : table) {
        if (cat.name.empty()) throw ConfigError("strategy record without a name");
        for (const auto& tool : cat.recommended_tools)
            if (std::find(subset.begin(), subset.end(), tool) == subset.end())
                throw ConfigError("category '" + cat.name + "' recommends tool '" + tool +
                                  "' outside the " + task_name(task) + " subset");
    }
}

}  // namespace

std::vector<CategoryStrategy> parse_strategy_file(const std::string& text) {
    std::vector<CategoryStrategy> table;
    std::stringstream ss(text);
    std::string line;
    CategoryStrategy* cur = nullptr;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line == "[category]") {
            table.emplace_back();
            cur = &table.back();
            continue;
        }
        const auto colon = line.find(':');
        if (!cur || colon == std::string::npos)
            throw ConfigError("strategy file: bad line " + std::to_string(line_no) + ": " + line);
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key == "name")
            cur->name = value;
        else if (key == "description")
            cur->description = value;
        else if (key == "tools")
            cur->recommended_tools = split_csv(value);
        else if (key == "step")
            cur->steps.push_back(value);
        else
            throw ConfigError("strategy file: unknown key '" + key + "' at line " +
                              std::to_string(line_no));
    }
    return table;
}

std::vector<CategoryStrategy> load_strategy_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open strategy file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_strategy_file(buf.str());
}

std::vector<CategoryStrategy> category_table(TaskKind task) {
    auto table = parse_strategy_file(default_strategy_text(task));
    validate_table(task, table);
    return table;
}

namespace {

std::string answer_schema_text(TaskKind task) {
    std::string s = "When you have sufficient visual evidence, stop calling tools and reply "
                    "with exactly one fenced block:\n\n```\n";
    if (task == TaskKind::TaskI)
        s += "answer: Yes or No\n";
    else
        s += "choice: A, B, C or D\n";
    s += "rationale: one or two sentences citing the resource ids you used\n```\n";
    return s;
}

}  // namespace

PromptBundle build_system_prompt(TaskKind task) {
    return build_system_prompt(task, category_table(task));
}

PromptBundle build_system_prompt(TaskKind task, const std::vector<CategoryStrategy>& table) {
    validate_table(task, table);

    std::string table_text;
    for (const auto& cat : table) {
        table_text += "### " + cat.name + "\n" + cat.description + "\n";
        if (!cat.recommended_tools.empty()) {
            table_text += "Recommended tools: ";
            for (std::size_t i = 0; i < cat.recommended_tools.size(); ++i)
                table_text += (i ? ", " : "") + cat.recommended_tools[i];
            table_text += "\n";
        }
        for (std::size_t i = 0; i < cat.steps.size(); ++i)
            table_text += std::to_string(i + 1) + ". " + cat.steps[i] + "\n";
        table_text += "\n";
    }

    PromptBundle bundle;
    bundle.tool_subset = tool_subset(task);
    bundle.answer_schema = answer_schema_text(task);
    bundle.prompt_version =
        "toolsight/1 " + task_name(task) + " cat-" + sha256_hex(table_text).substr(0, 8);

    std::string p;
    p += "[" + bundle.prompt_version + "]\n";
    p += "You are a careful visual analyst verifying whether an apparent optical illusion or "
         "visual anomaly actually holds in the given image. ";
    p += task == TaskKind::TaskI
             ? "Answer the binary question about the image.\n\n"
             : "Answer the four-way multiple-choice question about the image.\n\n";
    p += "First classify the question into exactly one of the categories below, then follow "
         "that category's procedure.\n\n";
    p += "## Question categories\n\n" + table_text;
    p += "## Tool rules\n"
         "- Every tool call creates a new immutable image resource (img_001, img_002, ...). "
         "No tool ever modifies an existing image.\n"
         "- Always cite source images by resource id. The original image is \"original\".\n"
         "- You may branch: any earlier resource can be cropped, annotated or compared again.\n"
         "- Use show_resource to re-view any previously created resource.\n"
         "- Trust what the annotated images show over what the scene appears to be. Any exact "
         "pixel difference is a real difference, however small.\n\n";
    p += "## Final answer\n" + bundle.answer_schema;
    p += "\nWork zero-shot from this image only; no examples are provided.\n";
    bundle.system_prompt = std::move(p);
    return bundle;
}

std::string compressed_category_summary(TaskKind task) {
    std::string s;
    for (const auto& cat : category_table(task))
        s += "- " + cat.name + ": " + cat.description + "\n";
    return s;
}

}  // namespace toolsight
